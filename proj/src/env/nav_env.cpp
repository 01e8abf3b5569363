#include "ioda/env/nav_env.hpp"

#include "ioda/env/env_config.hpp"

#include <algorithm>
#include <cmath>

namespace ioda::env {

void NavConfig::validate() const {
  if (step_penalty < 0 || leave_penalty < 0 || y_motion_penalty < 0)
    throw Error("NavConfig: penalties must be non-negative");
  if (goal_radius <= 0) throw Error("NavConfig: goal radius must be positive");
  if (max_speed <= 0) throw Error("NavConfig: max speed must be positive");
  if (workspace.x_max <= workspace.x_min || workspace.y_max <= workspace.y_min)
    throw Error("NavConfig: empty workspace");
  if (episode_cap <= 0) throw Error("NavConfig: episode cap must be positive");
  if (reset_outside_fraction < 0 || reset_outside_fraction > 1)
    throw Error("NavConfig: reset_outside_fraction must be in [0,1]");
}

StateVector NavState::flatten() const {
  StateVector v(4);
  v << x, y, gx, gy;
  return v;
}

NavState NavState::from_vector(const Eigen::VectorXd& v) {
  require_dim(v, 4, "NavState");
  return NavState{v[0], v[1], v[2], v[3]};
}

NavTransition nav_step(const NavState& s, const ActionVector& action, const NavConfig& cfg) {
  require_dim(action, 2, "nav_step action");
  const double ax = std::clamp(action[0], -cfg.max_speed, cfg.max_speed);
  const double ay = std::clamp(action[1], -cfg.max_speed, cfg.max_speed);

  NavTransition t;
  t.next = s;
  t.next.x = s.x + ax;
  t.next.y = s.y + ay;

  const double d_before = std::hypot(s.x - s.gx, s.y - s.gy);
  const double d_after = std::hypot(t.next.x - t.next.gx, t.next.y - t.next.gy);
  t.in_workspace = cfg.workspace.contains(t.next.x, t.next.y);
  t.goal_reached = d_after <= cfg.goal_radius;

  double r = -cfg.step_penalty + cfg.progress_shaping * (d_before - d_after);
  if (t.goal_reached) r += cfg.goal_reward;
  if (!t.in_workspace) {
    r -= cfg.leave_penalty;
    if (cfg.variant == NavRewardVariant::return_home) r -= cfg.y_motion_penalty * std::abs(ay);
  }
  t.reward = r;
  return t;
}

NavEnv::NavEnv(NavConfig cfg) : cfg_(cfg) { cfg_.validate(); }

ActionBounds NavEnv::action_bounds() const {
  return ActionBounds{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, cfg_.max_speed)};
}

StateVector NavEnv::state_offset() const {
  const double cx = 0.5 * (cfg_.workspace.x_min + cfg_.workspace.x_max);
  const double cy = 0.5 * (cfg_.workspace.y_min + cfg_.workspace.y_max);
  StateVector v(4);
  v << cx, cy, cx, cy;
  return v;
}

StateVector NavEnv::state_scale() const {
  const double hx = 0.5 * (cfg_.workspace.x_max - cfg_.workspace.x_min);
  const double hy = 0.5 * (cfg_.workspace.y_max - cfg_.workspace.y_min);
  StateVector v(4);
  v << hx, hy, hx, hy;
  return v;
}

StateVector NavEnv::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& w = cfg_.workspace;
  const double m = cfg_.reset_margin;
  std::uniform_real_distribution<double> ux(w.x_min + m, w.x_max - m);
  std::uniform_real_distribution<double> uy(w.y_min + m, w.y_max - m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  NavState s;
  s.gx = ux(rng);
  s.gy = uy(rng);
  if (unit(rng) < cfg_.reset_outside_fraction) {
    // Lateral strips beside the workspace; y stays in the workspace range.
    const double b = cfg_.reset_outside_band;
    std::uniform_real_distribution<double> strip(0.0, b);
    const double off = strip(rng);
    s.x = unit(rng) < 0.5 ? w.x_min - b + off : w.x_max + b - off;
    s.y = uy(rng);
  } else {
    do {
      s.x = ux(rng);
      s.y = uy(rng);
    } while (std::hypot(s.x - s.gx, s.y - s.gy) <= 2.0 * cfg_.goal_radius);
  }
  return reset_to(s);
}

StateVector NavEnv::reset_to(const NavState& s) {
  state_ = s;
  tick_ = 0;
  done_ = false;
  return observe();
}

StepResult NavEnv::step(const ActionVector& action) {
  if (done_) throw EpisodeOver();
  const NavTransition t = nav_step(state_, action, cfg_);
  state_ = t.next;
  ++tick_;

  StepResult r;
  r.next_state = state_.flatten();
  r.reward = t.reward;
  r.info.in_workspace = t.in_workspace;
  r.info.goal_reached = t.goal_reached;
  r.info.timeout = !t.goal_reached && tick_ >= cfg_.episode_cap;
  r.done = t.goal_reached || r.info.timeout || (cfg_.terminate_outside && !t.in_workspace);
  done_ = r.done;
  return r;
}

StateVector NavEnv::preview(const ActionVector& action) const { return nav_step(state_, action, cfg_).next.flatten(); }

void NavEnv::restore(const Eigen::VectorXd& snapshot, int tick) {
  state_ = NavState::from_vector(snapshot);
  tick_ = tick;
  done_ = false;
}

json NavEnv::config_json() const { return env_config_to_json(cfg_); }

}  // namespace ioda::env
