#include "ioda/harness/study.hpp"

#include "ioda/core/digest.hpp"
#include "ioda/core/json_io.hpp"
#include "ioda/env/env_config.hpp"

namespace ioda::harness {

namespace fs = std::filesystem;

std::string StudySpec::config_digest() const {
  return digest_hex(train_env->config_json().dump() + pc_env->config_json().dump() + pipeline.to_json().dump() +
                    plan.to_json().dump());
}

StudySpec load_study(const fs::path& path) {
  const json j = read_json_file(path);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& key) -> std::optional<fs::path> {
    if (!j.contains(key)) return std::nullopt;
    fs::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  StudySpec s;
  s.source = path;
  s.name = j.value("name", path.stem().string());
  const auto train = resolve("train_env");
  if (!train) throw Error("study " + path.string() + ": missing train_env");
  const fs::path eval = resolve("eval_env").value_or(*train);
  const fs::path collect = resolve("collect_env").value_or(eval);
  const fs::path pc = resolve("pc_env").value_or(collect);
  s.train_env = env::load_environment(*train);
  s.eval_env = env::load_environment(eval);
  s.collect_env = env::load_environment(collect);
  s.pc_env = env::load_environment(pc);
  for (const auto* e : {s.eval_env.get(), s.collect_env.get(), s.pc_env.get()})
    if (e->id() != s.train_env->id()) throw Error("study " + path.string() + ": environments disagree on type");
  if (const auto p = resolve("sac")) s.pipeline.sac = learn::sac_config_from_json(read_json_file(*p));
  if (const auto p = resolve("svdd")) s.pipeline.svdd = ood::svdd_config_from_json(read_json_file(*p));
  s.pipeline.rollouts = j.value("rollouts", s.pipeline.rollouts);
  s.pipeline.collect_seed = j.value("collect_seed", s.pipeline.collect_seed);
  s.pipeline.knn_quantile = j.value("knn_quantile", s.pipeline.knn_quantile);
  if (!j.contains("plan")) throw Error("study " + path.string() + ": missing plan");
  s.plan = ExperimentPlan::from_json(j.at("plan"));
  s.plan.validate();
  return s;
}

StudyArtifacts run_study_pipeline(StudySpec& spec, const fs::path& dir) {
  auto a = build_artifacts(spec.name, *spec.train_env, *spec.eval_env, *spec.collect_env, spec.pipeline);
  save_artifacts(a, dir, spec.train_env->id(), spec.config_digest());
  if (a.training) write_json_file(dir / "training.json", a.training->to_json());
  return a;
}

}  // namespace ioda::harness
