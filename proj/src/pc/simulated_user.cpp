#include "ioda/pc/simulated_user.hpp"

#include <algorithm>
#include <cmath>

namespace ioda::pc {

NavXController::NavXController(NavUserConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.subgoal_radius <= 0 || cfg_.max_speed <= 0) throw Error("NavXController: radius and speed must be positive");
}

void NavXController::reset(std::uint64_t) { next_ = 0; }

ActionVector NavXController::act(const StateVector& obs, int) {
  require_dim(obs, 4, "NavXController observation");
  const double x = obs[0], y = obs[1];
  while (next_ < cfg_.subgoals.size() &&
         std::hypot(x - cfg_.subgoals[next_].x, y - cfg_.subgoals[next_].y) <= cfg_.subgoal_radius)
    ++next_;
  const double target = next_ < cfg_.subgoals.size() ? cfg_.subgoals[next_].x : obs[2];
  ActionVector u = ActionVector::Zero(2);
  u[0] = std::clamp(target - x, -cfg_.max_speed, cfg_.max_speed);
  return u;
}

json NavXController::to_json() const {
  json sg = json::array();
  for (const auto& p : cfg_.subgoals) sg.push_back({p.x, p.y});
  return json{{"kind", "nav_x_controller"}, {"subgoals", sg}, {"subgoal_radius", cfg_.subgoal_radius}};
}

PourScript::PourScript(PourUserConfig cfg, env::PourConfig env_cfg) : cfg_(cfg), env_(env_cfg), eff_(cfg) {
  if (cfg_.region_begin >= cfg_.region_end) throw Error("PourScript: empty pour region");
  if (cfg_.reaction_latency < 1) throw Error("PourScript: reaction latency must be at least one tick");
}

void PourScript::reset(std::uint64_t seed) {
  eff_ = cfg_;
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  eff_.target_outflow *= 1.0 + cfg_.jitter * unit(rng);
  eff_.region_begin += 0.1 * cfg_.jitter * unit(rng);
  eff_.region_end += 0.1 * cfg_.jitter * unit(rng);
  eff_.pre_tilt_margin *= 1.0 + cfg_.jitter * unit(rng);
  if (cfg_.latency_jitter > 0) {
    std::uniform_int_distribution<int> lat(-cfg_.latency_jitter, cfg_.latency_jitter);
    eff_.reaction_latency = std::max(1, cfg_.reaction_latency + lat(rng));
  }
  last_path_ = -1.0;
  stalled_ = 0;
  levelled_ = false;
  levelled_at_ = 0.0;
}

ActionVector PourScript::act(const StateVector& obs, int) {
  require_dim(obs, 3, "PourScript observation");
  const double p = obs[0], theta = obs[1], remaining = obs[2];
  const bool pouring = theta > env_.theta_spill && remaining > 0.0;

  if (last_path_ >= 0.0 && p - last_path_ <= 1e-12 && pouring)
    ++stalled_;
  else
    stalled_ = 0;
  last_path_ = p;
  if (!levelled_ && stalled_ >= eff_.reaction_latency) {
    levelled_ = true;
    levelled_at_ = p;
  }
  if (levelled_ && p >= levelled_at_ + eff_.reengage_distance) {
    levelled_ = false;
    stalled_ = 0;
  }

  const double hold = env_.theta_spill - eff_.pre_tilt_margin;
  double target = 0.0;
  if (p < eff_.region_begin)
    target = hold;
  else if (p <= eff_.region_end && remaining > 0.0)
    target = levelled_ ? hold : env_.theta_spill + eff_.target_outflow / env_.outflow_coeff;

  ActionVector u = ActionVector::Zero(2);
  u[1] = std::clamp(target - theta, -env_.max_wrist_speed, env_.max_wrist_speed);
  return u;
}

json PourScript::to_json() const {
  return json{{"kind", "pour_script"},
              {"pre_tilt_margin", eff_.pre_tilt_margin},
              {"target_outflow", eff_.target_outflow},
              {"region", {eff_.region_begin, eff_.region_end}},
              {"reaction_latency", eff_.reaction_latency},
              {"reengage_distance", eff_.reengage_distance}};
}

ReplayUser::ReplayUser(std::vector<ActionVector> inputs, std::size_t action_dim)
    : inputs_(std::move(inputs)), dim_(action_dim) {
  for (const auto& u : inputs_) require_dim(u, dim_, "ReplayUser input");
}

ActionVector ReplayUser::act(const StateVector&, int) {
  if (pos_ < inputs_.size()) return inputs_[pos_++];
  return ActionVector::Zero(static_cast<Eigen::Index>(dim_));
}

}  // namespace ioda::pc
