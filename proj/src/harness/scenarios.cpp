#include "ioda/harness/scenarios.hpp"

#include <cmath>
#include <random>

namespace ioda::harness {

namespace {
json point_json(const pc::Point2& p) { return json::array({p.x, p.y}); }
pc::Point2 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
}  // namespace

json NavLayout::to_json() const {
  return json{{"left_start", point_json(left_start)},   {"left_subgoal", point_json(left_subgoal)},
              {"right_start", point_json(right_start)}, {"right_subgoal", point_json(right_subgoal)},
              {"goal", point_json(goal)},               {"jitter", jitter},
              {"subgoal_radius", subgoal_radius}};
}

NavLayout NavLayout::from_json(const json& j) {
  NavLayout l;
  if (j.contains("left_start")) l.left_start = point_from(j["left_start"]);
  if (j.contains("left_subgoal")) l.left_subgoal = point_from(j["left_subgoal"]);
  if (j.contains("right_start")) l.right_start = point_from(j["right_start"]);
  if (j.contains("right_subgoal")) l.right_subgoal = point_from(j["right_subgoal"]);
  if (j.contains("goal")) l.goal = point_from(j["goal"]);
  l.jitter = j.value("jitter", l.jitter);
  l.subgoal_radius = j.value("subgoal_radius", l.subgoal_radius);
  return l;
}

NavTrial nav_trial(const NavLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 17);
  std::uniform_real_distribution<double> j(-layout.jitter, layout.jitter);
  NavTrial t;
  t.seed = seed;
  t.left = seed % 2 == 0;
  const pc::Point2 start = t.left ? layout.left_start : layout.right_start;
  t.subgoal = t.left ? layout.left_subgoal : layout.right_subgoal;
  t.start.x = start.x + j(rng);
  t.start.y = start.y + j(rng);
  t.start.gx = layout.goal.x + j(rng);
  t.start.gy = layout.goal.y + j(rng);
  return t;
}

pc::EpisodeStart nav_start(const NavTrial& trial) {
  return [s = trial.start](env::Environment& e, std::uint64_t) {
    auto* nav = dynamic_cast<env::NavEnv*>(&e);
    if (!nav) throw Error("nav_start: not a navigation environment");
    return nav->reset_to(s);
  };
}

pc::NavXController nav_user(const NavLayout& layout, const NavTrial& trial, const env::NavConfig& env_cfg) {
  pc::NavUserConfig cfg;
  cfg.subgoals = {trial.subgoal};
  cfg.subgoal_radius = layout.subgoal_radius;
  cfg.max_speed = env_cfg.max_speed;
  return pc::NavXController(cfg);
}

json NavOutcome::to_json() const {
  return json{{"subgoal_reached", subgoal_reached},     {"goal_reached", goal_reached},
              {"both_goals", both()},                   {"outside_ticks", outside_ticks},
              {"inside_ticks", inside_ticks},           {"mean_abs_dy_outside", mean_abs_dy_outside},
              {"mean_abs_dy_inside", mean_abs_dy_inside}};
}

NavOutcome evaluate_nav(const pc::EpisodeReport& report, const NavTrial& trial, const NavLayout& layout,
                        const env::NavConfig& env_cfg) {
  NavOutcome o;
  o.goal_reached = report.goal_reached;
  auto near_subgoal = [&](const StateVector& s) {
    return std::hypot(s[0] - trial.subgoal.x, s[1] - trial.subgoal.y) <= layout.subgoal_radius;
  };
  double dy_out = 0.0, dy_in = 0.0;
  for (const auto& t : report.ticks) {
    if (near_subgoal(t.state) || near_subgoal(t.next_state)) o.subgoal_reached = true;
    const double dy = std::abs(t.next_state[1] - t.state[1]);
    if (env_cfg.workspace.contains(t.state[0], t.state[1])) {
      dy_in += dy;
      ++o.inside_ticks;
    } else {
      dy_out += dy;
      ++o.outside_ticks;
    }
  }
  if (o.outside_ticks) o.mean_abs_dy_outside = dy_out / static_cast<double>(o.outside_ticks);
  if (o.inside_ticks) o.mean_abs_dy_inside = dy_in / static_cast<double>(o.inside_ticks);
  return o;
}

}  // namespace ioda::harness
