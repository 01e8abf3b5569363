#include "ioda/pc/episode_report.hpp"

#include "ioda/core/digest.hpp"

#include <sstream>

namespace ioda::pc {

namespace {

json info_json(const env::StepInfo& i) {
  return json{{"spilling", i.spilling}, {"in_workspace", i.in_workspace}, {"timeout", i.timeout},
              {"goal_reached", i.goal_reached}};
}

env::StepInfo info_from_json(const json& j) {
  env::StepInfo i;
  i.spilling = j.at("spilling").get<bool>();
  i.in_workspace = j.at("in_workspace").get<bool>();
  i.timeout = j.at("timeout").get<bool>();
  i.goal_reached = j.at("goal_reached").get<bool>();
  return i;
}

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.size() == b.size() && a == b; }

}  // namespace

json TickRecord::to_json() const {
  json j{{"tick", tick},
         {"state", ioda::to_json(state)},
         {"snapshot", ioda::to_json(snapshot)},
         {"policy_state", ioda::to_json(policy_state)},
         {"ood", ood},
         {"imagined", imagined},
         {"ood_score", ood_score ? json(*ood_score) : json(nullptr)},
         {"user", ioda::to_json(user)},
         {"policy_action", ioda::to_json(policy_action)},
         {"applied", ioda::to_json(applied)},
         {"stop_active", stop_active},
         {"reward", reward},
         {"next_state", ioda::to_json(next_state)},
         {"info", info_json(info)},
         {"expected_next", expected_next ? ioda::to_json(*expected_next) : json(nullptr)}};
  return j;
}

TickRecord TickRecord::from_json(const json& j) {
  TickRecord t;
  t.tick = j.at("tick").get<int>();
  t.state = vector_from_json(j.at("state"));
  t.snapshot = vector_from_json(j.at("snapshot"));
  t.policy_state = vector_from_json(j.at("policy_state"));
  t.ood = j.at("ood").get<bool>();
  t.imagined = j.at("imagined").get<bool>();
  if (!j.at("ood_score").is_null()) t.ood_score = j.at("ood_score").get<double>();
  t.user = vector_from_json(j.at("user"));
  t.policy_action = vector_from_json(j.at("policy_action"));
  t.applied = vector_from_json(j.at("applied"));
  t.stop_active = j.at("stop_active").get<bool>();
  t.reward = j.at("reward").get<double>();
  t.next_state = vector_from_json(j.at("next_state"));
  t.info = info_from_json(j.at("info"));
  if (!j.at("expected_next").is_null()) t.expected_next = vector_from_json(j.at("expected_next"));
  return t;
}

bool operator==(const TickRecord& a, const TickRecord& b) {
  const bool exp_eq = a.expected_next.has_value() == b.expected_next.has_value() &&
                      (!a.expected_next || same(*a.expected_next, *b.expected_next));
  return a.tick == b.tick && same(a.state, b.state) && same(a.snapshot, b.snapshot) &&
         same(a.policy_state, b.policy_state) && a.ood == b.ood && a.imagined == b.imagined &&
         a.ood_score == b.ood_score && same(a.user, b.user) && same(a.policy_action, b.policy_action) &&
         same(a.applied, b.applied) && a.stop_active == b.stop_active && a.reward == b.reward &&
         same(a.next_state, b.next_state) && a.info.spilling == b.info.spilling &&
         a.info.in_workspace == b.info.in_workspace && a.info.timeout == b.info.timeout &&
         a.info.goal_reached == b.info.goal_reached && exp_eq;
}

std::vector<ActionVector> EpisodeReport::user_inputs() const {
  std::vector<ActionVector> out;
  out.reserve(ticks.size());
  for (const auto& t : ticks) out.push_back(t.user);
  return out;
}

std::size_t EpisodeReport::imagined_ticks() const {
  std::size_t n = 0;
  for (const auto& t : ticks) n += t.imagined;
  return n;
}

json EpisodeReport::to_json() const {
  json tj = json::array();
  for (const auto& t : ticks) tj.push_back(t.to_json());
  return json{{"format", "ioda.episode"},
              {"version", 1},
              {"env", env_id},
              {"condition", to_string(condition)},
              {"seed", seed},
              {"partition", partition.to_json()},
              {"initial_snapshot", ioda::to_json(initial_snapshot)},
              {"final_snapshot", ioda::to_json(final_snapshot)},
              {"goal_reached", goal_reached},
              {"timeout", timeout},
              {"total_reward", total_reward},
              {"alignment", alignment ? json(*alignment) : json(nullptr)},
              {"metrics", metrics},
              {"metadata", metadata},
              {"ticks", tj}};
}

EpisodeReport EpisodeReport::from_json(const json& j) {
  if (j.value("format", "") != "ioda.episode" || j.value("version", 0) != 1)
    throw ArchiveError("not a version-1 episode report");
  EpisodeReport r;
  r.env_id = j.at("env").get<std::string>();
  r.condition = condition_kind_from_string(j.at("condition").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.partition = AxisPartition::from_json(j.at("partition"));
  r.initial_snapshot = vector_from_json(j.at("initial_snapshot"));
  r.final_snapshot = vector_from_json(j.at("final_snapshot"));
  r.goal_reached = j.at("goal_reached").get<bool>();
  r.timeout = j.at("timeout").get<bool>();
  r.total_reward = j.at("total_reward").get<double>();
  if (!j.at("alignment").is_null()) r.alignment = j.at("alignment").get<double>();
  r.metrics = j.at("metrics");
  r.metadata = j.at("metadata");
  for (const auto& t : j.at("ticks")) r.ticks.push_back(TickRecord::from_json(t));
  return r;
}

std::string EpisodeReport::digest() const { return digest_hex(to_json().dump()); }

std::string trajectory_csv(const EpisodeReport& r) {
  std::ostringstream out;
  out.precision(17);
  const auto n = r.ticks.empty() ? 0 : r.ticks.front().state.size();
  const auto m = r.ticks.empty() ? 0 : r.ticks.front().applied.size();
  out << "tick";
  for (Eigen::Index i = 0; i < n; ++i) out << ",s" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",policy_s" << i;
  for (Eigen::Index i = 0; i < m; ++i) out << ",a" << i;
  out << ",ood,imagined,stop_active,reward\n";
  for (const auto& t : r.ticks) {
    out << t.tick;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << t.state[i];
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << t.policy_state[i];
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << t.applied[i];
    out << ',' << t.ood << ',' << t.imagined << ',' << t.stop_active << ',' << t.reward << '\n';
  }
  if (!r.ticks.empty()) {
    const auto& last = r.ticks.back();
    out << last.tick + 1;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << last.next_state[i];
    for (Eigen::Index i = 0; i < n; ++i) out << ',';
    for (Eigen::Index i = 0; i < m; ++i) out << ',';
    out << ",,,,\n";
  }
  return out.str();
}

}  // namespace ioda::pc
