#pragma once

#include "ioda/env/environment.hpp"

#include <array>

namespace ioda::env {

inline constexpr std::size_t kBinCount = 5;
using BinMasses = std::array<double, kBinCount>;

/// Pour error: total deficit of the bins relative to the per-bin target (overfill is not counted).
double pour_error(const BinMasses& bins, double target_per_bin = 68.0);

struct PourConfig {
  double initial_mass = 400.0;      // g
  double theta_spill = 1.2;         // rad
  double outflow_coeff = 10.0;      // g per rad over threshold per tick
  BinMasses bin_centers{0.2, 0.35, 0.5, 0.65, 0.8};
  double bin_half_width = 0.07;
  double max_path_speed = 0.075;    // path fraction per tick
  double max_wrist_speed = 0.2;     // rad per tick
  /// "Moving too fast" spill: path speed above spill_speed while the wrist angle exceeds spill_margin.
  bool speed_trigger = false;
  double spill_speed = 0.025;
  double spill_margin = 0.5;
  double tick_penalty = 0.1;
  double spill_penalty = 1.0;
  /// Extra penalty c * (|v| - spill_speed)^2 on ticks where the speed trigger fires.
  double overspeed_penalty = 0.0;
  double goal_reward = 10.0;
  double target_per_bin = 68.0;     // g
  int episode_cap = 60;
  double start_jitter = 0.02;
  /// Training-time resets with a random wrist angle and partially emptied cup.
  double tilted_reset_fraction = 0.0;
  double tilted_reset_max_theta = 2.6;
  double tilted_reset_max_path = 0.9;

  void validate() const;
};

struct PourState {
  double path = 0.0;   // normalized path position in [0,1]
  double theta = 0.0;  // wrist angle in [0, pi]
  double remaining = 0.0;
  BinMasses bins{};
  double lost = 0.0;

  /// Observation [path, theta, remaining].
  StateVector flatten() const;
  /// Full internal state [path, theta, remaining, b1..b5, lost].
  Eigen::VectorXd full() const;
  static PourState from_full(const Eigen::VectorXd& v);
  double total_mass() const;
};

struct PourTransition {
  PourState next;
  double outflow = 0.0;
  double reward = 0.0;
  bool spilling = false;
  bool goal_reached = false;
};

/// Index of the bin whose interval contains `path`, or -1.
int bin_at(double path, const PourConfig& cfg);

/// One tick: integrate path and wrist, pour over the new position, score the tick.
PourTransition pour_step(const PourState& s, const ActionVector& action, const PourConfig& cfg);

class PourEnv final : public Environment {
 public:
  static constexpr Eigen::Index kPathDim = 0;
  static constexpr Eigen::Index kWristDim = 1;

  explicit PourEnv(PourConfig cfg = {});

  std::string id() const override { return "pour"; }
  std::size_t state_dim() const override { return 3; }
  std::size_t action_dim() const override { return 2; }
  ActionBounds action_bounds() const override;
  StateVector state_offset() const override;
  StateVector state_scale() const override;

  StateVector reset(std::uint64_t seed) override;
  StateVector reset_to(const PourState& s);
  StateVector observe() const override { return state_.flatten(); }
  StepResult step(const ActionVector& action) override;
  StateVector preview(const ActionVector& action) const override;

  Eigen::VectorXd snapshot() const override { return state_.full(); }
  void restore(const Eigen::VectorXd& snapshot, int tick) override;

  bool done() const override { return done_; }
  int tick() const override { return tick_; }
  int episode_cap() const override { return cfg_.episode_cap; }

  const PourConfig& config() const { return cfg_; }
  const PourState& state() const { return state_; }

  json config_json() const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<PourEnv>(*this); }

 private:
  PourConfig cfg_;
  PourState state_;
  int tick_ = 0;
  bool done_ = false;
};

}  // namespace ioda::env
