#include "ioda/core/digest.hpp"
#include "ioda/env/env_config.hpp"
#include "ioda/harness/experiment.hpp"
#include "ioda/harness/study.hpp"
#include "ioda/service/teleop_server.hpp"
#include "ioda/store/archive.hpp"
#include "ioda/store/collect.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

using namespace ioda;
namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

learn::SacConfig load_sac(const std::string& path, std::optional<std::uint64_t> seed) {
  learn::SacConfig cfg = path.empty() ? learn::SacConfig{} : learn::sac_config_from_json(read_json_file(path));
  if (seed) cfg.seed = *seed;
  return cfg;
}

ood::SvddConfig load_svdd_config(const std::string& path) {
  return path.empty() ? ood::SvddConfig{} : ood::svdd_config_from_json(read_json_file(path));
}

std::vector<std::size_t> default_user_dims(const env::Environment& e) {
  return {e.id() == "pour" ? std::size_t{1} : std::size_t{0}};
}

int train_policy(const std::string& env_path, const std::string& eval_path, const std::string& sac_path,
                 std::optional<std::uint64_t> seed, const fs::path& out) {
  auto train_env = env::load_environment(env_path);
  auto eval_env = env::load_environment(eval_path.empty() ? env_path : eval_path);
  const learn::SacConfig cfg = load_sac(sac_path, seed);
  try {
    auto result = learn::train(*train_env, *eval_env, cfg);
    learn::save_policy(result.policy, out, train_env->id(), digest_hex(train_env->config_json().dump() + cfg.to_json().dump()));
    fs::path log = out;
    log.replace_extension(".training.json");
    write_json_file(log, result.report.to_json());
    std::cout << "trained " << result.report.steps << " steps, eval success " << result.report.final_success << "\n";
    return 0;
  } catch (const learn::TrainingFailure& f) {
    fs::path log = out;
    log.replace_extension(".training.json");
    write_json_file(log, f.report().to_json());
    std::cerr << f.what() << " (curve written to " << log << ")\n";
    return 2;
  }
}

void run_pipeline(const std::string& train_path, const std::string& eval_path, const std::string& collect_path,
                  const std::string& sac_path, const std::string& svdd_path, std::size_t rollouts,
                  std::uint64_t collect_seed, const fs::path& out) {
  auto train_env = env::load_environment(train_path);
  auto eval_env = env::load_environment(eval_path.empty() ? train_path : eval_path);
  auto collect_env = env::load_environment(collect_path.empty() ? (eval_path.empty() ? train_path : eval_path) : collect_path);
  harness::PipelineConfig cfg;
  cfg.sac = load_sac(sac_path, std::nullopt);
  cfg.svdd = load_svdd_config(svdd_path);
  cfg.rollouts = rollouts;
  cfg.collect_seed = collect_seed;
  const auto a = harness::build_artifacts(out.filename().string(), *train_env, *eval_env, *collect_env, cfg);
  harness::save_artifacts(a, out, train_env->id(), digest_hex(train_env->config_json().dump() + cfg.to_json().dump()));
  if (a.training) write_json_file(out / "training.json", a.training->to_json());
  std::cout << a.summary().dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned control with imaginary out-of-distribution actions"};
  app.require_subcommand(1);

  std::string env_path, eval_path, collect_path, sac_path, svdd_path, out, policy_path, archive_path, artifacts,
      condition = "IODA", detector = "svdd", spec_path, kind = "svdd", address = "127.0.0.1", trajectory_path;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_value = 0, collect_seed = 11;
  std::size_t episodes = 1000;
  double quantile = 0.99, tick_hz = 20.0;
  unsigned short port = 8765;
  std::vector<std::size_t> user_dims;

  auto* train = app.add_subcommand("train-policy", "Train a SAC policy and write its manifest");
  train->add_option("--env-config", env_path, "training environment config")->required()->check(CLI::ExistingFile);
  train->add_option("--eval-config", eval_path, "evaluation environment config (defaults to training)")->check(CLI::ExistingFile);
  train->add_option("--sac-config", sac_path, "SAC hyperparameters")->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "override the SAC seed");
  train->add_option("--out", out, "policy manifest path")->required();

  auto* collect = app.add_subcommand("collect-rollouts", "Record deterministic-policy episodes");
  collect->add_option("--env-config", env_path)->required()->check(CLI::ExistingFile);
  collect->add_option("--policy", policy_path, "policy manifest")->required()->check(CLI::ExistingFile);
  collect->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  collect->add_option("--seed", seed_value);
  collect->add_option("--out", out, "rollout archive (.jsonl)")->required();

  auto* fit = app.add_subcommand("fit-detector", "Fit an OOD detector on an archive's states");
  fit->add_option("--archive", archive_path)->required()->check(CLI::ExistingFile);
  fit->add_option("--env-config", env_path, "environment config used for input normalization")->required()->check(CLI::ExistingFile);
  fit->add_option("--kind", kind)->check(CLI::IsMember({"svdd", "knn"}));
  fit->add_option("--svdd-config", svdd_path)->check(CLI::ExistingFile);
  fit->add_option("--quantile", quantile)->check(CLI::Range(0.5, 1.0));
  fit->add_option("--out", out, "detector file")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Train, collect and fit into one artifact directory");
  pipeline->add_option("--env-config", env_path, "training environment config")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--eval-config", eval_path)->check(CLI::ExistingFile);
  pipeline->add_option("--collect-config", collect_path)->check(CLI::ExistingFile);
  pipeline->add_option("--sac-config", sac_path)->check(CLI::ExistingFile);
  pipeline->add_option("--svdd-config", svdd_path)->check(CLI::ExistingFile);
  pipeline->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  pipeline->add_option("--seed", collect_seed, "collection seed");
  pipeline->add_option("--out", out, "artifact directory")->required();

  auto* episode = app.add_subcommand("run-episode", "Run one partitioned-control episode with the scripted user");
  episode->add_option("--env-config", env_path)->required()->check(CLI::ExistingFile);
  episode->add_option("--artifacts", artifacts, "artifact directory")->required()->check(CLI::ExistingDirectory);
  episode->add_option("--condition", condition)->check(CLI::IsMember({"RL", "STOP", "IODA"}));
  episode->add_option("--detector", detector)->check(CLI::IsMember({"svdd", "knn"}));
  episode->add_option("--seed", seed_value);
  episode->add_option("--out", out, "episode report (.json)")->required();
  episode->add_option("--trajectory", trajectory_path, "trajectory CSV");

  auto* experiment = app.add_subcommand("run-experiment", "Run every condition x seed cell of a spec");
  experiment->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);

  auto* study = app.add_subcommand("run-study", "Train, collect, fit and run every cell of a study file");
  study->add_option("--study", spec_path, "study file (see configs/studies)")->required()->check(CLI::ExistingFile);
  study->add_option("--out", out, "output directory")->required();

  auto* serve = app.add_subcommand("serve", "Live partitioned-control sessions over WebSocket");
  serve->add_option("--env-config", env_path)->required()->check(CLI::ExistingFile);
  serve->add_option("--artifacts", artifacts)->required()->check(CLI::ExistingDirectory);
  serve->add_option("--condition", condition, "initial condition")->check(CLI::IsMember({"RL", "STOP", "IODA"}));
  serve->add_option("--detector", detector)->check(CLI::IsMember({"svdd", "knn"}));
  serve->add_option("--address", address);
  serve->add_option("--port", port);
  serve->add_option("--tick-hz", tick_hz)->check(CLI::PositiveNumber);
  serve->add_option("--user-dims", user_dims, "user-owned action dimensions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return train_policy(env_path, eval_path, sac_path, seed, out);

    if (*collect) {
      auto e = env::load_environment(env_path);
      const auto loaded = learn::load_policy(policy_path);
      const auto history = store::collect(loaded.policy, *e, episodes, seed_value);
      store::save_history(history, out);
      std::cout << "collected " << history.size() << " episodes, " << history.total_states() << " states\n";
      return 0;
    }

    if (*fit) {
      auto e = env::load_environment(env_path);
      const std::string text = read_text_file(archive_path);
      const auto history = store::parse_history(text);
      if (kind == "svdd") {
        ood::SvddConfig c = load_svdd_config(svdd_path);
        c.quantile = quantile;
        c.input_offset = e->state_offset();
        c.input_scale = e->state_scale();
        ood::SvddFitLog log;
        auto d = ood::fit_svdd(history.state_matrix(), c, &log);
        d.training_digest = digest_hex(text);
        ood::save_svdd(d, out);
        std::cout << "svdd radius " << d.threshold() << " (mean radius " << log.mean_radius_before << " -> "
                  << log.mean_radius_after << ")\n";
      } else {
        auto index = std::make_shared<store::StateIndex>(store::StateIndex::from_history(history));
        auto d = ood::fit_knn(index, quantile);
        d.training_digest = digest_hex(text);
        ood::save_knn(d, out);
        std::cout << "knn delta " << d.threshold() << "\n";
      }
      return 0;
    }

    if (*pipeline) {
      run_pipeline(env_path, eval_path, collect_path, sac_path, svdd_path, episodes, collect_seed, out);
      return 0;
    }

    if (*episode) {
      auto e = env::load_environment(env_path);
      const auto a = harness::load_artifacts(artifacts);
      harness::ExperimentPlan plan;
      plan.name = "run-episode";
      plan.conditions = {pc::condition_kind_from_string(condition)};
      plan.seeds = {seed_value};
      plan.detector_kind = detector;
      plan.user_dims = default_user_dims(*e);
      plan.stop_predicate = e->id() == "pour" ? pc::FailurePredicate::spilling : pc::FailurePredicate::outside_workspace;
      const auto report = harness::run_experiment(plan, *e, a);
      const auto& cell = report.cells.front();
      write_json_file(out, cell.report.to_json());
      if (!trajectory_path.empty()) write_text_file(trajectory_path, pc::trajectory_csv(cell.report));
      std::cout << cell.metrics.dump() << "\n";
      return 0;
    }

    if (*experiment) {
      const auto report = harness::run_experiment_spec(spec_path);
      std::cout << report.aggregate_csv();
      if (report.alignment_vs_pour_error)
        std::cout << "pearson(alignment, pour_error) = " << report.alignment_vs_pour_error->r << " (n = "
                  << report.alignment_vs_pour_error->n << ")\n";
      return 0;
    }

    if (*study) {
      auto spec = harness::load_study(spec_path);
      const auto a = harness::run_study_pipeline(spec, fs::path(out) / "artifacts");
      const auto report = harness::run_experiment(spec.plan, *spec.pc_env, a);
      harness::write_experiment(report, fs::path(out) / "experiment");
      std::cout << report.aggregate_csv();
      if (report.alignment_vs_pour_error)
        std::cout << "pearson(alignment, pour_error) = " << report.alignment_vs_pour_error->r << "\n";
      return 0;
    }

    if (*serve) {
      auto e = std::shared_ptr<const env::Environment>(env::load_environment(env_path));
      const auto a = harness::load_artifacts(artifacts);
      auto cfg = std::make_shared<service::SessionConfig>();
      cfg->prototype = e;
      cfg->policy = a.policy;
      cfg->store = a.index;
      cfg->detector = a.detector(detector);
      cfg->partition = pc::AxisPartition::user_owns(e->action_dim(), user_dims.empty() ? default_user_dims(*e) : user_dims);
      cfg->initial_condition = pc::condition_kind_from_string(condition);
      cfg->stop_predicate = e->id() == "pour" ? pc::FailurePredicate::spilling : pc::FailurePredicate::outside_workspace;
      cfg->tick_hz = tick_hz;
      service::TeleopServer server({address, port, tick_hz}, cfg);
      server.start();
      std::cout << "serving ws://" << address << ":" << server.port() << "/session (healthz at /healthz)\n" << std::flush;
      std::signal(SIGINT, [](int) { g_interrupted = true; });
      std::signal(SIGTERM, [](int) { g_interrupted = true; });
      while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
