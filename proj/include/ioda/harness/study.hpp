#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/harness/experiment.hpp"

namespace ioda::harness {

/// One study file ties the pipeline and the experiment together:
/// {"name", "train_env", "eval_env", "collect_env", "pc_env", "sac", "svdd", "rollouts",
///  "collect_seed", "plan"}. Paths resolve against the study file's directory; eval, collect and
/// pc environments default to the previous one in that list.
struct StudySpec {
  std::string name;
  std::filesystem::path source;
  std::unique_ptr<env::Environment> train_env, eval_env, collect_env, pc_env;
  PipelineConfig pipeline;
  ExperimentPlan plan;

  std::string config_digest() const;
};

StudySpec load_study(const std::filesystem::path& path);

/// Trains, collects and fits; writes the artifact directory and training.json under dir.
StudyArtifacts run_study_pipeline(StudySpec& spec, const std::filesystem::path& dir);

}  // namespace ioda::harness
