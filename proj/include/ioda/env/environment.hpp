#pragma once

#include "ioda/core/json_io.hpp"
#include "ioda/core/types.hpp"

#include <memory>
#include <string>

namespace ioda::env {

struct StepInfo {
  bool spilling = false;
  bool in_workspace = true;
  bool timeout = false;
  bool goal_reached = false;
};

struct StepResult {
  StateVector next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

class EpisodeOver : public Error {
 public:
  EpisodeOver() : Error("step() called on a finished episode; reset first") {}
};

/// Common step/reset contract of the simulated MDPs.
///
/// The observation (what policies, detectors and the rollout store see) may be a projection of a
/// larger internal state; snapshot()/restore() expose the full internal state so an episode can be
/// re-evaluated offline, and preview() evaluates the transition without mutating anything.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual ActionBounds action_bounds() const = 0;
  /// Affine normalization applied to observations before they enter a network.
  virtual StateVector state_offset() const = 0;
  virtual StateVector state_scale() const = 0;

  virtual StateVector reset(std::uint64_t seed) = 0;
  virtual StateVector observe() const = 0;
  virtual StepResult step(const ActionVector& action) = 0;
  virtual StateVector preview(const ActionVector& action) const = 0;

  virtual Eigen::VectorXd snapshot() const = 0;
  /// Puts the environment into a previously snapshotted state at the given tick; clears done.
  virtual void restore(const Eigen::VectorXd& snapshot, int tick) = 0;

  virtual bool done() const = 0;
  virtual int tick() const = 0;
  virtual int episode_cap() const = 0;

  virtual json config_json() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace ioda::env
