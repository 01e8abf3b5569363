#include "ioda/harness/pipeline.hpp"

#include "ioda/core/digest.hpp"
#include "ioda/store/archive.hpp"
#include "ioda/store/collect.hpp"

namespace ioda::harness {

json PipelineConfig::to_json() const {
  return json{{"sac", sac.to_json()},
              {"rollouts", rollouts},
              {"collect_seed", collect_seed},
              {"svdd", svdd.to_json()},
              {"knn_quantile", knn_quantile}};
}

std::shared_ptr<const ood::OodDetector> StudyArtifacts::detector(const std::string& kind) const {
  if (kind == "svdd" && svdd) return svdd;
  if (kind == "knn" && knn) return knn;
  throw Error("StudyArtifacts: no '" + kind + "' detector");
}

json StudyArtifacts::summary() const {
  json j{{"label", label}};
  if (training) j["training"] = training->to_json();
  if (history) j["rollouts"] = {{"episodes", history->size()}, {"states", history->total_states()},
                                {"digest", history_digest}};
  if (svdd) {
    j["svdd"] = {{"radius", svdd->threshold()}, {"quantile", svdd->quantile()}};
    if (svdd_log) {
      j["svdd"]["mean_radius_before"] = svdd_log->mean_radius_before;
      j["svdd"]["mean_radius_after"] = svdd_log->mean_radius_after;
    }
  }
  if (knn) j["knn"] = {{"delta", knn->threshold()}, {"quantile", knn->quantile()}};
  return j;
}

StudyArtifacts artifacts_from_policy(std::string label, std::shared_ptr<const learn::GaussianPolicy> policy,
                                     const env::Environment& collect_env, const PipelineConfig& cfg) {
  StudyArtifacts a;
  a.label = std::move(label);
  a.policy = std::move(policy);
  auto history = std::make_shared<store::RolloutHistory>(store::collect(*a.policy, collect_env, cfg.rollouts, cfg.collect_seed));
  a.history_digest = digest_hex(store::serialize_history(*history));
  a.history = history;
  a.index = std::make_shared<store::StateIndex>(store::StateIndex::from_history(*history));

  ood::SvddConfig scfg = cfg.svdd;
  if (!scfg.input_offset.size()) scfg.input_offset = collect_env.state_offset();
  if (!scfg.input_scale.size()) scfg.input_scale = collect_env.state_scale();
  ood::SvddFitLog log;
  auto svdd = std::make_shared<ood::SvddDetector>(ood::fit_svdd(history->state_matrix(), scfg, &log));
  svdd->training_digest = a.history_digest;
  a.svdd = svdd;
  a.svdd_log = std::move(log);
  if (cfg.fit_knn) {
    auto knn = std::make_shared<ood::KnnDetector>(ood::fit_knn(a.index, cfg.knn_quantile));
    knn->training_digest = a.history_digest;
    a.knn = knn;
  }
  return a;
}

StudyArtifacts build_artifacts(std::string label, env::Environment& train_env, const env::Environment& eval_env,
                               const env::Environment& collect_env, const PipelineConfig& cfg) {
  learn::TrainResult trained = learn::train(train_env, eval_env, cfg.sac);
  auto policy = std::make_shared<learn::GaussianPolicy>(std::move(trained.policy));
  StudyArtifacts a = artifacts_from_policy(std::move(label), policy, collect_env, cfg);
  a.training = std::move(trained.report);
  return a;
}

void save_artifacts(const StudyArtifacts& a, const std::filesystem::path& dir, const std::string& env_id,
                    const std::string& config_digest) {
  std::filesystem::create_directories(dir);
  learn::save_policy(*a.policy, dir / "policy.json", env_id, config_digest);
  store::save_history(*a.history, dir / "rollouts.jsonl");
  if (a.svdd) ood::save_svdd(*a.svdd, dir / "svdd.json");
  if (a.knn) ood::save_knn(*a.knn, dir / "knn.json");
  json meta = a.summary();
  write_json_file(dir / "artifacts.json", meta);
}

StudyArtifacts load_artifacts(const std::filesystem::path& dir, std::string label) {
  StudyArtifacts a;
  a.label = label.empty() ? dir.filename().string() : std::move(label);
  a.policy = std::make_shared<learn::GaussianPolicy>(learn::load_policy(dir / "policy.json").policy);
  const std::string text = read_text_file(dir / "rollouts.jsonl");
  auto history = std::make_shared<store::RolloutHistory>(store::parse_history(text));
  a.history_digest = digest_hex(text);
  a.history = history;
  a.index = std::make_shared<store::StateIndex>(store::StateIndex::from_history(*history));
  if (std::filesystem::exists(dir / "svdd.json")) {
    auto svdd = std::make_shared<ood::SvddDetector>(ood::load_svdd(dir / "svdd.json"));
    if (!svdd->training_digest.empty() && svdd->training_digest != a.history_digest)
      throw ArchiveError("load_artifacts: svdd detector was fitted on a different archive");
    a.svdd = svdd;
  }
  if (std::filesystem::exists(dir / "knn.json"))
    a.knn = std::make_shared<ood::KnnDetector>(ood::load_knn(dir / "knn.json", a.index, a.history_digest));
  return a;
}

}  // namespace ioda::harness
