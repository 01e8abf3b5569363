#pragma once

#include "ioda/env/environment.hpp"

#include <random>

namespace ioda::env {

enum class NavRewardVariant { workspace_penalty, return_home };

struct Rect {
  double x_min = 0.0, x_max = 10.0, y_min = 0.0, y_max = 10.0;
  bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

struct NavConfig {
  Rect workspace;
  double max_speed = 0.25;  // m per tick, per axis
  NavRewardVariant variant = NavRewardVariant::workspace_penalty;
  double goal_radius = 0.3;
  double step_penalty = 0.1;
  double leave_penalty = 5.0;
  double y_motion_penalty = 5.0;  // per meter of |a_y| while outside, return_home only
  double goal_reward = 10.0;
  int episode_cap = 200;
  /// Reward for distance-to-goal reduction, k * (d_before - d_after).
  double progress_shaping = 1.0;
  /// Leaving the workspace ends the episode (training-time restriction).
  bool terminate_outside = false;
  /// Fraction of resets that start in a strip of width reset_outside_band left or right of the workspace.
  double reset_outside_fraction = 0.0;
  double reset_outside_band = 4.0;
  double reset_margin = 0.5;

  void validate() const;
};

struct NavState {
  double x = 0.0, y = 0.0, gx = 0.0, gy = 0.0;
  StateVector flatten() const;
  static NavState from_vector(const Eigen::VectorXd& v);
};

struct NavTransition {
  NavState next;
  double reward = 0.0;
  bool goal_reached = false;
  bool in_workspace = true;
};

/// One kinematic tick from `s`. The action is clipped to the speed box first.
NavTransition nav_step(const NavState& s, const ActionVector& action, const NavConfig& cfg);

class NavEnv final : public Environment {
 public:
  explicit NavEnv(NavConfig cfg = {});

  std::string id() const override { return "nav"; }
  std::size_t state_dim() const override { return 4; }
  std::size_t action_dim() const override { return 2; }
  ActionBounds action_bounds() const override;
  StateVector state_offset() const override;
  StateVector state_scale() const override;

  StateVector reset(std::uint64_t seed) override;
  StateVector reset_to(const NavState& s);
  StateVector observe() const override { return state_.flatten(); }
  StepResult step(const ActionVector& action) override;
  StateVector preview(const ActionVector& action) const override;

  Eigen::VectorXd snapshot() const override { return state_.flatten(); }
  void restore(const Eigen::VectorXd& snapshot, int tick) override;

  bool done() const override { return done_; }
  int tick() const override { return tick_; }
  int episode_cap() const override { return cfg_.episode_cap; }

  const NavConfig& config() const { return cfg_; }
  const NavState& state() const { return state_; }

  json config_json() const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<NavEnv>(*this); }

 private:
  NavConfig cfg_;
  NavState state_;
  int tick_ = 0;
  bool done_ = false;
};

}  // namespace ioda::env
