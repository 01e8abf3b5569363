#include "ioda/env/pour_env.hpp"

#include "ioda/env/env_config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ioda::env {

double pour_error(const BinMasses& bins, double target_per_bin) {
  double phi = 0.0;
  for (double b : bins) phi += std::max(target_per_bin - b, 0.0);
  return phi;
}

void PourConfig::validate() const {
  if (initial_mass <= 0) throw Error("PourConfig: initial mass must be positive");
  if (bin_half_width <= 0) throw Error("PourConfig: bin half-width must be positive");
  for (std::size_t i = 0; i < kBinCount; ++i) {
    if (bin_centers[i] - bin_half_width < 0.0 || bin_centers[i] + bin_half_width > 1.0)
      throw Error("PourConfig: bin outside the path");
    if (i > 0 && bin_centers[i - 1] + bin_half_width >= bin_centers[i] - bin_half_width)
      throw Error("PourConfig: bins must be ordered and non-overlapping");
  }
  if (target_per_bin * static_cast<double>(kBinCount) > initial_mass)
    throw Error("PourConfig: a perfect pour needs more mass than the cup holds");
  if (tick_penalty < 0 || spill_penalty < 0 || overspeed_penalty < 0) throw Error("PourConfig: penalties must be non-negative");
  if (episode_cap <= 0) throw Error("PourConfig: episode cap must be positive");
}

StateVector PourState::flatten() const {
  StateVector v(3);
  v << path, theta, remaining;
  return v;
}

Eigen::VectorXd PourState::full() const {
  Eigen::VectorXd v(4 + static_cast<Eigen::Index>(kBinCount));
  v[0] = path;
  v[1] = theta;
  v[2] = remaining;
  for (std::size_t i = 0; i < kBinCount; ++i) v[3 + static_cast<Eigen::Index>(i)] = bins[i];
  v[3 + static_cast<Eigen::Index>(kBinCount)] = lost;
  return v;
}

PourState PourState::from_full(const Eigen::VectorXd& v) {
  require_dim(v, 4 + kBinCount, "PourState::from_full");
  PourState s;
  s.path = v[0];
  s.theta = v[1];
  s.remaining = v[2];
  for (std::size_t i = 0; i < kBinCount; ++i) s.bins[i] = v[3 + static_cast<Eigen::Index>(i)];
  s.lost = v[3 + static_cast<Eigen::Index>(kBinCount)];
  return s;
}

double PourState::total_mass() const {
  double m = remaining + lost;
  for (double b : bins) m += b;
  return m;
}

int bin_at(double path, const PourConfig& cfg) {
  for (std::size_t i = 0; i < kBinCount; ++i)
    if (std::abs(path - cfg.bin_centers[i]) <= cfg.bin_half_width) return static_cast<int>(i);
  return -1;
}

PourTransition pour_step(const PourState& s, const ActionVector& action, const PourConfig& cfg) {
  require_dim(action, 2, "pour_step action");
  const double v = std::clamp(action[0], -cfg.max_path_speed, cfg.max_path_speed);
  const double w = std::clamp(action[1], -cfg.max_wrist_speed, cfg.max_wrist_speed);

  PourTransition t;
  t.next = s;
  t.next.path = std::clamp(s.path + v, 0.0, 1.0);
  t.next.theta = std::clamp(s.theta + w, 0.0, std::numbers::pi);

  t.outflow = std::min(cfg.outflow_coeff * std::max(t.next.theta - cfg.theta_spill, 0.0), s.remaining);
  if (t.outflow > 0.0) {
    t.next.remaining = s.remaining - t.outflow;
    const int bin = bin_at(t.next.path, cfg);
    if (bin >= 0)
      t.next.bins[static_cast<std::size_t>(bin)] += t.outflow;
    else
      t.next.lost += t.outflow;
  }

  const bool too_fast = cfg.speed_trigger && std::abs(v) > cfg.spill_speed && t.next.theta > cfg.spill_margin;
  t.spilling = t.outflow > 0.0 || too_fast;
  t.goal_reached = t.next.path >= 1.0;

  double r = 0.0;
  if (!t.goal_reached) r -= cfg.tick_penalty;
  if (t.spilling) r -= cfg.spill_penalty;
  if (too_fast) r -= cfg.overspeed_penalty * (std::abs(v) - cfg.spill_speed) * (std::abs(v) - cfg.spill_speed);
  if (t.goal_reached) r += cfg.goal_reward;
  t.reward = r;
  return t;
}

PourEnv::PourEnv(PourConfig cfg) : cfg_(cfg) { cfg_.validate(); }

ActionBounds PourEnv::action_bounds() const {
  Eigen::VectorXd half(2);
  half << cfg_.max_path_speed, cfg_.max_wrist_speed;
  return ActionBounds{Eigen::VectorXd::Zero(2), half};
}

StateVector PourEnv::state_offset() const {
  StateVector v(3);
  v << 0.5, 0.5 * std::numbers::pi, 0.5 * cfg_.initial_mass;
  return v;
}

StateVector PourEnv::state_scale() const { return state_offset(); }

StateVector PourEnv::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PourState s;
  s.remaining = cfg_.initial_mass;
  s.path = cfg_.start_jitter * unit(rng);
  if (unit(rng) < cfg_.tilted_reset_fraction) {
    s.path = cfg_.tilted_reset_max_path * unit(rng);
    s.theta = cfg_.tilted_reset_max_theta * unit(rng);
    s.remaining = cfg_.initial_mass * unit(rng);
    s.lost = cfg_.initial_mass - s.remaining;
  }
  return reset_to(s);
}

StateVector PourEnv::reset_to(const PourState& s) {
  state_ = s;
  tick_ = 0;
  done_ = false;
  return observe();
}

StepResult PourEnv::step(const ActionVector& action) {
  if (done_) throw EpisodeOver();
  const PourTransition t = pour_step(state_, action, cfg_);
  state_ = t.next;
  ++tick_;

  StepResult r;
  r.next_state = state_.flatten();
  r.reward = t.reward;
  r.info.spilling = t.spilling;
  r.info.goal_reached = t.goal_reached;
  r.info.timeout = !t.goal_reached && tick_ >= cfg_.episode_cap;
  r.done = t.goal_reached || r.info.timeout;
  done_ = r.done;
  return r;
}

StateVector PourEnv::preview(const ActionVector& action) const {
  return pour_step(state_, action, cfg_).next.flatten();
}

void PourEnv::restore(const Eigen::VectorXd& snapshot, int tick) {
  state_ = PourState::from_full(snapshot);
  tick_ = tick;
  done_ = false;
}

json PourEnv::config_json() const { return env_config_to_json(cfg_); }

}  // namespace ioda::env
