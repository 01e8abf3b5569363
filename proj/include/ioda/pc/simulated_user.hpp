#pragma once

#include "ioda/env/nav_env.hpp"
#include "ioda/env/pour_env.hpp"
#include "ioda/pc/partition.hpp"

#include <memory>
#include <random>

namespace ioda::pc {

/// Source of user-axis commands. Values on robot-owned dims are discarded by the executor.
class UserModel {
 public:
  virtual ~UserModel() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual ActionVector act(const StateVector& observation, int tick) = 0;
  virtual json to_json() const = 0;
  virtual std::unique_ptr<UserModel> clone() const = 0;
};

struct Point2 {
  double x = 0.0, y = 0.0;
};

struct NavUserConfig {
  std::vector<Point2> subgoals;
  double subgoal_radius = 0.3;
  double max_speed = 0.25;
};

/// Drives the x axis to the next subgoal's x, then to the goal's x from the observation.
class NavXController final : public UserModel {
 public:
  explicit NavXController(NavUserConfig cfg);
  void reset(std::uint64_t seed) override;
  ActionVector act(const StateVector& observation, int tick) override;
  json to_json() const override;
  std::unique_ptr<UserModel> clone() const override { return std::make_unique<NavXController>(*this); }

  std::size_t subgoals_reached() const { return next_; }
  const NavUserConfig& config() const { return cfg_; }

 private:
  NavUserConfig cfg_;
  std::size_t next_ = 0;
};

struct PourUserConfig {
  double pre_tilt_margin = 0.1;     // rad below the spill angle held while approaching
  double target_outflow = 13.0;     // g per tick over the pour region
  double region_begin = 0.13;
  double region_end = 0.87;
  int reaction_latency = 10;        // stalled pouring ticks before the user levels the wrist
  double reengage_distance = 0.1;   // path travel before pouring resumes after levelling
  double jitter = 0.1;              // relative per-seed perturbation of outflow and region
  int latency_jitter = 2;
};

/// Scripted wrist: pre-tilt, pour at a constant outflow over the bin region, level afterwards.
/// If the path stalls while pouring for `reaction_latency` ticks the wrist is levelled until the
/// cup has moved on by `reengage_distance`.
class PourScript final : public UserModel {
 public:
  PourScript(PourUserConfig cfg, env::PourConfig env_cfg);
  void reset(std::uint64_t seed) override;
  ActionVector act(const StateVector& observation, int tick) override;
  json to_json() const override;
  std::unique_ptr<UserModel> clone() const override { return std::make_unique<PourScript>(*this); }

  /// Parameters in effect for the current episode after jitter.
  const PourUserConfig& effective() const { return eff_; }

 private:
  PourUserConfig cfg_;
  env::PourConfig env_;
  PourUserConfig eff_;
  double last_path_ = -1.0;
  int stalled_ = 0;
  bool levelled_ = false;
  double levelled_at_ = 0.0;
};

/// Emits a recorded sequence of commands, then zeros.
class ReplayUser final : public UserModel {
 public:
  explicit ReplayUser(std::vector<ActionVector> inputs, std::size_t action_dim);
  void reset(std::uint64_t) override { pos_ = 0; }
  ActionVector act(const StateVector&, int) override;
  json to_json() const override { return json{{"kind", "replay"}, {"ticks", inputs_.size()}}; }
  std::unique_ptr<UserModel> clone() const override { return std::make_unique<ReplayUser>(*this); }

 private:
  std::vector<ActionVector> inputs_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

/// Always emits zero.
class IdleUser final : public UserModel {
 public:
  explicit IdleUser(std::size_t action_dim) : dim_(action_dim) {}
  void reset(std::uint64_t) override {}
  ActionVector act(const StateVector&, int) override { return ActionVector::Zero(static_cast<Eigen::Index>(dim_)); }
  json to_json() const override { return json{{"kind", "idle"}}; }
  std::unique_ptr<UserModel> clone() const override { return std::make_unique<IdleUser>(*this); }

 private:
  std::size_t dim_;
};

}  // namespace ioda::pc
