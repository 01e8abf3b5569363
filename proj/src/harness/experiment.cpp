#include "ioda/harness/experiment.hpp"

#include "ioda/env/env_config.hpp"

#include <cstdio>
#include <sstream>

namespace ioda::harness {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

pc::Condition make_condition(pc::ConditionKind kind, const ExperimentPlan& plan, const StudyArtifacts& a) {
  auto det = a.detector(plan.detector_kind);
  pc::Condition c;
  switch (kind) {
    case pc::ConditionKind::rl: c = pc::Condition::rl(det); break;
    case pc::ConditionKind::stop: c = pc::Condition::stop(plan.stop_predicate, det); break;
    case pc::ConditionKind::ioda: c = pc::Condition::ioda(det, a.index); break;
  }
  c.detector_id = a.label + "/" + plan.detector_kind;
  c.store_id = a.label + "/rollouts@" + a.history_digest;
  return c;
}

pc::PourUserConfig pour_user_from_json(const json& j) {
  pc::PourUserConfig c;
  c.pre_tilt_margin = j.value("pre_tilt_margin", c.pre_tilt_margin);
  c.target_outflow = j.value("target_outflow", c.target_outflow);
  c.region_begin = j.value("region_begin", c.region_begin);
  c.region_end = j.value("region_end", c.region_end);
  c.reaction_latency = j.value("reaction_latency", c.reaction_latency);
  c.reengage_distance = j.value("reengage_distance", c.reengage_distance);
  c.jitter = j.value("jitter", c.jitter);
  c.latency_jitter = j.value("latency_jitter", c.latency_jitter);
  return c;
}

json pour_user_to_json(const pc::PourUserConfig& c) {
  return json{{"pre_tilt_margin", c.pre_tilt_margin}, {"target_outflow", c.target_outflow},
              {"region_begin", c.region_begin},       {"region_end", c.region_end},
              {"reaction_latency", c.reaction_latency}, {"reengage_distance", c.reengage_distance},
              {"jitter", c.jitter},                   {"latency_jitter", c.latency_jitter}};
}

}  // namespace

void ExperimentPlan::validate() const {
  if (seeds.empty()) throw Error("ExperimentPlan: empty seed list");
  if (conditions.empty()) throw Error("ExperimentPlan: no conditions");
  if (detector_kind != "svdd" && detector_kind != "knn") throw Error("ExperimentPlan: unknown detector kind");
}

json ExperimentPlan::to_json() const {
  json conds = json::array();
  for (auto c : conditions) conds.push_back(pc::to_string(c));
  return json{{"name", name},
              {"conditions", conds},
              {"seeds", seeds},
              {"stop_predicate", pc::to_string(stop_predicate)},
              {"detector", detector_kind},
              {"user_dims", user_dims},
              {"nav_layout", nav_layout.to_json()},
              {"pour_user", pour_user_to_json(pour_user)}};
}

ExperimentPlan ExperimentPlan::from_json(const json& j) {
  ExperimentPlan p;
  p.name = j.value("name", p.name);
  if (j.contains("conditions")) {
    p.conditions.clear();
    for (const auto& c : j["conditions"]) p.conditions.push_back(pc::condition_kind_from_string(c.get<std::string>()));
  }
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    if (s.is_object()) {
      const auto first = s.value("first", std::uint64_t{0});
      const auto count = s.value("count", std::uint64_t{0});
      for (std::uint64_t i = 0; i < count; ++i) p.seeds.push_back(first + i);
    } else {
      p.seeds = s.get<std::vector<std::uint64_t>>();
    }
  }
  if (j.contains("stop_predicate"))
    p.stop_predicate = pc::failure_predicate_from_string(j["stop_predicate"].get<std::string>());
  p.detector_kind = j.value("detector", p.detector_kind);
  if (j.contains("user_dims")) p.user_dims = j["user_dims"].get<std::vector<std::size_t>>();
  if (j.contains("nav_layout")) p.nav_layout = NavLayout::from_json(j["nav_layout"]);
  if (j.contains("pour_user")) p.pour_user = pour_user_from_json(j["pour_user"]);
  p.validate();
  return p;
}

json ConditionAggregate::to_json(const std::string& env_id) const {
  json j{{"condition", pc::to_string(condition)}, {"episodes", episodes},        {"goal_rate", goal_rate},
         {"mean_ticks", mean_ticks},             {"mean_alignment", mean_alignment}, {"sd_alignment", sd_alignment}};
  if (env_id == "nav") {
    j["subgoal_rate"] = subgoal_rate;
    j["both_goals_rate"] = both_goals_rate;
    j["mean_abs_dy_outside"] = mean_abs_dy_outside;
    j["mean_abs_dy_inside"] = mean_abs_dy_inside;
  } else {
    j["mean_pour_error"] = mean_pour_error;
    j["sd_pour_error"] = sd_pour_error;
  }
  return j;
}

const ConditionAggregate& ExperimentReport::aggregate(pc::ConditionKind k) const {
  for (const auto& a : aggregates)
    if (a.condition == k) return a;
  throw Error("ExperimentReport: condition " + pc::to_string(k) + " was not run");
}

std::vector<ConditionAggregate> aggregate_cells(const std::string& env_id, const std::vector<CellResult>& cells,
                                                const std::vector<pc::ConditionKind>& conditions) {
  std::vector<ConditionAggregate> out;
  for (auto kind : conditions) {
    ConditionAggregate a;
    a.condition = kind;
    std::vector<double> align, phi, ticks;
    double goals = 0, subgoals = 0, both = 0, dy_out = 0, dy_in = 0, n_out = 0, n_in = 0;
    for (const auto& c : cells) {
      if (c.condition != kind) continue;
      const json& m = c.metrics;
      ++a.episodes;
      goals += m.at("goal_reached").get<bool>();
      ticks.push_back(m.at("ticks").get<double>());
      if (!m.at("alignment").is_null()) align.push_back(m.at("alignment").get<double>());
      if (env_id == "nav") {
        subgoals += m.at("subgoal_reached").get<bool>();
        both += m.at("both_goals").get<bool>();
        dy_out += m.at("dy_outside_sum").get<double>();
        dy_in += m.at("dy_inside_sum").get<double>();
        n_out += m.at("outside_ticks").get<double>();
        n_in += m.at("inside_ticks").get<double>();
      } else {
        phi.push_back(m.at("pour_error").get<double>());
      }
    }
    if (a.episodes == 0) continue;
    const double n = static_cast<double>(a.episodes);
    a.goal_rate = goals / n;
    a.mean_ticks = mean(ticks);
    if (!align.empty()) {
      a.mean_alignment = mean(align);
      a.sd_alignment = stddev(align);
    }
    if (env_id == "nav") {
      a.subgoal_rate = subgoals / n;
      a.both_goals_rate = both / n;
      a.mean_abs_dy_outside = n_out > 0 ? dy_out / n_out : 0.0;
      a.mean_abs_dy_inside = n_in > 0 ? dy_in / n_in : 0.0;
    } else {
      a.mean_pour_error = mean(phi);
      a.sd_pour_error = stddev(phi);
    }
    out.push_back(a);
  }
  return out;
}

Correlation correlate(const ExperimentReport& report) {
  std::vector<double> align, phi;
  for (const auto& c : report.cells) {
    if (c.metrics.at("alignment").is_null() || !c.metrics.contains("pour_error")) continue;
    align.push_back(c.metrics["alignment"].get<double>());
    phi.push_back(c.metrics["pour_error"].get<double>());
  }
  return pearson(align, phi);
}

pc::ExecutorSetup experiment_setup(const ExperimentPlan& plan, pc::ConditionKind kind,
                                   const env::Environment& pc_env, const StudyArtifacts& artifacts) {
  pc::ExecutorSetup setup;
  setup.policy = artifacts.policy;
  setup.partition = pc::AxisPartition::user_owns(pc_env.action_dim(), plan.user_dims);
  setup.condition = make_condition(kind, plan, artifacts);
  setup.expectation = std::make_shared<const pc::ExpectationModel>(artifacts.index, artifacts.policy, setup.partition);
  setup.metadata = {{"experiment", plan.name}, {"policy", artifacts.label}};
  return setup;
}

ExperimentReport run_experiment(const ExperimentPlan& plan, const env::Environment& pc_env,
                                const StudyArtifacts& artifacts) {
  plan.validate();
  if (!artifacts.policy || !artifacts.index) throw pc::MissingArtifact("run_experiment: incomplete artifacts");
  artifacts.detector(plan.detector_kind);
  const std::string env_id = pc_env.id();
  const auto* nav_env = dynamic_cast<const env::NavEnv*>(&pc_env);
  const auto* pour_env = dynamic_cast<const env::PourEnv*>(&pc_env);
  if (!nav_env && !pour_env) throw Error("run_experiment: unsupported environment " + env_id);


  ExperimentReport report;
  report.env_id = env_id;
  report.plan = plan.to_json();
  report.artifacts = artifacts.summary();
  report.artifacts.erase("training");

  for (auto kind : plan.conditions) {
    const pc::ExecutorSetup setup = experiment_setup(plan, kind, pc_env, artifacts);
    for (auto seed : plan.seeds) {
      CellResult cell;
      cell.condition = kind;
      cell.seed = seed;
      json m;
      if (nav_env) {
        const NavTrial trial = nav_trial(plan.nav_layout, seed);
        auto user = nav_user(plan.nav_layout, trial, nav_env->config());
        cell.report = pc::run_episode(pc_env, setup, user, seed, nav_start(trial));
        const NavOutcome o = evaluate_nav(cell.report, trial, plan.nav_layout, nav_env->config());
        m = o.to_json();
        m["side"] = trial.left ? "left" : "right";
        m["dy_outside_sum"] = o.mean_abs_dy_outside * static_cast<double>(o.outside_ticks);
        m["dy_inside_sum"] = o.mean_abs_dy_inside * static_cast<double>(o.inside_ticks);
      } else {
        pc::PourScript user(plan.pour_user, pour_env->config());
        cell.report = pc::run_episode(pc_env, setup, user, seed);
        m["pour_error"] = cell.report.metrics.at("pour_error");
        m["lost"] = cell.report.metrics.at("lost");
        m["goal_reached"] = cell.report.goal_reached;
      }
      m["condition"] = pc::to_string(kind);
      m["seed"] = seed;
      m["ticks"] = cell.report.length();
      m["goal_reached"] = cell.report.goal_reached;
      m["total_reward"] = cell.report.total_reward;
      m["alignment"] = cell.report.alignment ? json(*cell.report.alignment) : json(nullptr);
      m["imagined_ticks"] = cell.report.metrics["imagined_ticks"];
      m["ood_ticks"] = cell.report.metrics["ood_ticks"];
      m["stop_ticks"] = cell.report.metrics["stop_ticks"];
      cell.metrics = std::move(m);
      cell.report_digest = cell.report.digest();
      report.cells.push_back(std::move(cell));
    }
  }
  report.aggregates = aggregate_cells(env_id, report.cells, plan.conditions);
  if (pour_env) {
    try {
      report.alignment_vs_pour_error = correlate(report);
    } catch (const UndefinedStatistic& e) {
      report.correlation_note = e.what();
    }
  }
  return report;
}

json ExperimentReport::to_json() const {
  json cj = json::array();
  for (const auto& c : cells) {
    json m = c.metrics;
    m["report_digest"] = c.report_digest;
    cj.push_back(m);
  }
  json aj = json::array();
  for (const auto& a : aggregates) aj.push_back(a.to_json(env_id));
  json j{{"format", "ioda.experiment"}, {"version", 1}, {"env", env_id}, {"plan", plan},
         {"artifacts", artifacts},      {"aggregates", aj}, {"cells", cj}};
  if (alignment_vs_pour_error)
    j["alignment_vs_pour_error"] = {{"r", alignment_vs_pour_error->r}, {"n", alignment_vs_pour_error->n}};
  else if (!correlation_note.empty())
    j["alignment_vs_pour_error"] = {{"r", nullptr}, {"undefined", correlation_note}};
  return j;
}

std::string ExperimentReport::aggregate_csv() const {
  std::ostringstream out;
  const bool nav = env_id == "nav";
  out << "condition,episodes,goal_rate,mean_ticks,mean_alignment,sd_alignment";
  out << (nav ? ",subgoal_rate,both_goals_rate,mean_abs_dy_outside,mean_abs_dy_inside\n"
              : ",mean_pour_error,sd_pour_error\n");
  for (const auto& a : aggregates) {
    out << pc::to_string(a.condition) << ',' << a.episodes << ',' << fmt(a.goal_rate) << ',' << fmt(a.mean_ticks)
        << ',' << fmt(a.mean_alignment) << ',' << fmt(a.sd_alignment);
    if (nav)
      out << ',' << fmt(a.subgoal_rate) << ',' << fmt(a.both_goals_rate) << ',' << fmt(a.mean_abs_dy_outside) << ','
          << fmt(a.mean_abs_dy_inside) << '\n';
    else
      out << ',' << fmt(a.mean_pour_error) << ',' << fmt(a.sd_pour_error) << '\n';
  }
  return out.str();
}

std::string ExperimentReport::cells_csv() const {
  std::ostringstream out;
  const bool nav = env_id == "nav";
  out << "condition,seed,ticks,goal_reached,alignment,imagined_ticks,stop_ticks";
  out << (nav ? ",subgoal_reached,both_goals,outside_ticks\n" : ",pour_error\n");
  for (const auto& c : cells) {
    const json& m = c.metrics;
    out << pc::to_string(c.condition) << ',' << c.seed << ',' << m["ticks"].get<std::size_t>() << ','
        << m["goal_reached"].get<bool>() << ',' << (m["alignment"].is_null() ? "" : fmt(m["alignment"].get<double>()))
        << ',' << m["imagined_ticks"].get<std::size_t>() << ',' << m["stop_ticks"].get<std::size_t>();
    if (nav)
      out << ',' << m["subgoal_reached"].get<bool>() << ',' << m["both_goals"].get<bool>() << ','
          << m["outside_ticks"].get<std::size_t>() << '\n';
    else
      out << ',' << fmt(m["pour_error"].get<double>()) << '\n';
  }
  return out.str();
}

void write_experiment(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "episodes");
  std::filesystem::create_directories(dir / "trajectories");
  write_json_file(dir / "report.json", report.to_json());
  write_text_file(dir / "aggregates.csv", report.aggregate_csv());
  write_text_file(dir / "cells.csv", report.cells_csv());
  for (const auto& c : report.cells) {
    const std::string stem = pc::to_string(c.condition) + "_" + std::to_string(c.seed);
    write_json_file(dir / "episodes" / (stem + ".json"), c.report.to_json());
    write_text_file(dir / "trajectories" / (stem + ".csv"), pc::trajectory_csv(c.report));
  }
}

ExperimentReport run_experiment_spec(const std::filesystem::path& spec_path) {
  const json spec = read_json_file(spec_path);
  const auto base = spec_path.parent_path();
  auto resolve = [&](const char* key) {
    std::filesystem::path p = require_field(spec, key).get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  const ExperimentPlan plan = ExperimentPlan::from_json(require_field(spec, "plan"));
  const auto env_path = resolve("env_config");
  const auto art_dir = resolve("artifacts");
  const auto out_dir = resolve("output");
  for (const auto& p : {env_path, art_dir / "policy.json", art_dir / "rollouts.jsonl",
                        art_dir / (plan.detector_kind + ".json")})
    if (!std::filesystem::exists(p)) throw pc::MissingArtifact("run_experiment: missing " + p.string());
  const auto pc_env = env::load_environment(env_path);
  const StudyArtifacts artifacts = load_artifacts(art_dir);
  ExperimentReport report = run_experiment(plan, *pc_env, artifacts);
  write_experiment(report, out_dir);
  return report;
}

}  // namespace ioda::harness
