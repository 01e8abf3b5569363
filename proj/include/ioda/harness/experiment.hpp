#pragma once

#include "ioda/harness/pipeline.hpp"
#include "ioda/harness/scenarios.hpp"
#include "ioda/harness/stats.hpp"

#include <filesystem>

namespace ioda::harness {

struct ExperimentPlan {
  std::string name = "experiment";
  std::vector<pc::ConditionKind> conditions{pc::ConditionKind::rl, pc::ConditionKind::stop, pc::ConditionKind::ioda};
  std::vector<std::uint64_t> seeds;
  pc::FailurePredicate stop_predicate = pc::FailurePredicate::spilling;
  std::string detector_kind = "svdd";
  std::vector<std::size_t> user_dims{0};
  NavLayout nav_layout;
  pc::PourUserConfig pour_user;

  void validate() const;
  json to_json() const;
  static ExperimentPlan from_json(const json& j);
};

struct CellResult {
  pc::ConditionKind condition = pc::ConditionKind::rl;
  std::uint64_t seed = 0;
  std::string report_digest;
  json metrics;  // flat per-episode metrics
  pc::EpisodeReport report;
};

struct ConditionAggregate {
  pc::ConditionKind condition = pc::ConditionKind::rl;
  std::size_t episodes = 0;
  double goal_rate = 0.0;
  double mean_ticks = 0.0;
  double mean_alignment = 0.0;
  double sd_alignment = 0.0;
  // navigation
  double subgoal_rate = 0.0;
  double both_goals_rate = 0.0;
  double mean_abs_dy_outside = 0.0;  // pooled over all outside ticks
  double mean_abs_dy_inside = 0.0;
  // pour
  double mean_pour_error = 0.0;
  double sd_pour_error = 0.0;

  json to_json(const std::string& env_id) const;
};

struct ExperimentReport {
  std::string env_id;
  json plan;
  json artifacts;
  std::vector<CellResult> cells;
  std::vector<ConditionAggregate> aggregates;
  std::optional<Correlation> alignment_vs_pour_error;
  std::string correlation_note;

  const ConditionAggregate& aggregate(pc::ConditionKind k) const;
  json to_json() const;
  std::string aggregate_csv() const;
  std::string cells_csv() const;
};

/// Per-condition aggregates from the flat per-episode metrics alone.
std::vector<ConditionAggregate> aggregate_cells(const std::string& env_id, const std::vector<CellResult>& cells,
                                                const std::vector<pc::ConditionKind>& conditions);

/// Pearson r between per-episode alignment error and pour error over all cells.
Correlation correlate(const ExperimentReport& report);

/// Executor setup one condition of the plan runs with.
pc::ExecutorSetup experiment_setup(const ExperimentPlan& plan, pc::ConditionKind kind,
                                   const env::Environment& pc_env, const StudyArtifacts& artifacts);

/// Runs every (condition, seed) cell with the scripted user for the environment type.
ExperimentReport run_experiment(const ExperimentPlan& plan, const env::Environment& pc_env,
                                const StudyArtifacts& artifacts);

/// report.json, aggregates.csv, cells.csv, episodes/<cond>_<seed>.json, trajectories/<cond>_<seed>.csv
void write_experiment(const ExperimentReport& report, const std::filesystem::path& dir);

/// File-driven run: {"env_config": path, "artifacts": dir, "output": dir, "plan": {...}}.
/// Relative paths resolve against the spec file's directory. All references are checked before any
/// cell runs.
ExperimentReport run_experiment_spec(const std::filesystem::path& spec_path);

}  // namespace ioda::harness
