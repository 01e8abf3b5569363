#pragma once

#include "ioda/learn/sac.hpp"
#include "ioda/ood/knn.hpp"
#include "ioda/ood/svdd.hpp"
#include "ioda/store/rollout.hpp"
#include "ioda/store/state_index.hpp"

#include <filesystem>
#include <memory>

namespace ioda::harness {

struct PipelineConfig {
  learn::SacConfig sac;
  std::size_t rollouts = 1000;
  std::uint64_t collect_seed = 11;
  ood::SvddConfig svdd;
  double knn_quantile = 0.99;
  bool fit_knn = true;

  json to_json() const;
};

/// Everything a partitioned-control study needs from one trained policy.
struct StudyArtifacts {
  std::string label;
  std::shared_ptr<const learn::GaussianPolicy> policy;
  std::optional<learn::TrainingReport> training;
  std::shared_ptr<const store::RolloutHistory> history;
  std::string history_digest;
  std::shared_ptr<const store::StateIndex> index;
  std::shared_ptr<const ood::SvddDetector> svdd;
  std::optional<ood::SvddFitLog> svdd_log;
  std::shared_ptr<const ood::KnnDetector> knn;

  std::shared_ptr<const ood::OodDetector> detector(const std::string& kind) const;
  json summary() const;
};

/// Collects rollouts with the policy and fits the detectors on their states.
StudyArtifacts artifacts_from_policy(std::string label, std::shared_ptr<const learn::GaussianPolicy> policy,
                                     const env::Environment& collect_env, const PipelineConfig& cfg);

/// Trains the policy first; throws learn::TrainingFailure when the success gate is not met.
StudyArtifacts build_artifacts(std::string label, env::Environment& train_env, const env::Environment& eval_env,
                               const env::Environment& collect_env, const PipelineConfig& cfg);

/// Directory layout: policy.json (+ policy.actor.json), rollouts.jsonl, svdd.json (+ sidecar), knn.json.
void save_artifacts(const StudyArtifacts& a, const std::filesystem::path& dir, const std::string& env_id,
                    const std::string& config_digest);
StudyArtifacts load_artifacts(const std::filesystem::path& dir, std::string label = "");

}  // namespace ioda::harness
