#include "ioda/pc/executor.hpp"

#include "ioda/env/pour_env.hpp"

namespace ioda::pc {

PartitionedExecutor::PartitionedExecutor(std::unique_ptr<env::Environment> env, ExecutorSetup setup)
    : env_(std::move(env)), setup_(std::move(setup)) {
  if (!env_) throw Error("PartitionedExecutor: no environment");
  if (!setup_.policy) throw MissingArtifact("PartitionedExecutor: no policy");
  if (setup_.policy->state_dim() != env_->state_dim() || setup_.policy->action_dim() != env_->action_dim())
    throw DimensionError("PartitionedExecutor: policy does not match the environment");
  if (setup_.partition.dim() != env_->action_dim()) throw DimensionError("PartitionedExecutor: partition dimension");
  setup_.partition.require_session();
  setup_.condition.validate(env_->state_dim());
}

void PartitionedExecutor::begin(std::uint64_t seed) {
  report_ = EpisodeReport{};
  report_.env_id = env_->id();
  report_.condition = setup_.condition.kind;
  report_.seed = seed;
  report_.partition = setup_.partition;
  report_.initial_snapshot = env_->snapshot();
  report_.final_snapshot = report_.initial_snapshot;
  report_.metadata = setup_.metadata;
  report_.metadata["condition"] = setup_.condition.to_json();
  report_.metadata["env_config"] = env_->config_json();
  report_.metadata["expectation_model"] = setup_.expectation ? "nearest_state_policy" : "none";
  last_info_ = env::StepInfo{};
  started_ = true;
  finish();
}

StateVector PartitionedExecutor::reset(std::uint64_t seed, const EpisodeStart& start) {
  const StateVector s = start ? start(*env_, seed) : env_->reset(seed);
  begin(seed);
  return s;
}

StateVector PartitionedExecutor::reset_to_snapshot(const Eigen::VectorXd& snapshot, std::uint64_t seed) {
  env_->restore(snapshot, 0);
  begin(seed);
  return env_->observe();
}

const TickRecord& PartitionedExecutor::step(const ActionVector& user_input) {
  if (!started_) throw Error("PartitionedExecutor: reset before stepping");
  if (env_->done()) throw env::EpisodeOver();
  const auto& part = setup_.partition;

  TickRecord t;
  t.tick = env_->tick();
  t.state = env_->observe();
  t.snapshot = env_->snapshot();
  t.user = mask_to_user(user_input, part);

  const EffectiveState eff = effective_state(t.state, setup_.condition);
  t.policy_state = eff.state;
  t.ood = eff.ood;
  t.imagined = eff.imagined;
  t.ood_score = eff.score;

  t.policy_action = mask_to_robot(setup_.policy->act(eff.state, true), part);
  t.stop_active = setup_.condition.kind == ConditionKind::stop && failure_holds(setup_.condition.failure, last_info_);
  if (t.stop_active) t.policy_action.setZero();
  t.applied = combine(t.user, t.policy_action, part);

  if (setup_.expectation) t.expected_next = setup_.expectation->predict(*env_, t.state, t.user);

  const env::StepResult r = env_->step(t.applied);
  t.reward = r.reward;
  t.next_state = r.next_state;
  t.info = r.info;
  last_info_ = r.info;
  report_.total_reward += r.reward;
  report_.ticks.push_back(std::move(t));
  finish();
  return report_.ticks.back();
}

void PartitionedExecutor::finish() {
  report_.final_snapshot = env_->snapshot();
  if (!report_.ticks.empty()) {
    report_.goal_reached = report_.ticks.back().info.goal_reached;
    report_.timeout = report_.ticks.back().info.timeout;
  }
  std::size_t ood = 0, imagined = 0, stopped = 0;
  double align_sum = 0.0;
  std::size_t align_n = 0;
  for (const auto& t : report_.ticks) {
    ood += t.ood;
    imagined += t.imagined;
    stopped += t.stop_active;
    if (t.expected_next && setup_.expectation) {
      align_sum += setup_.expectation->distance(*t.expected_next, t.next_state);
      ++align_n;
    }
  }
  if (align_n > 0) report_.alignment = align_sum / static_cast<double>(align_n);
  json& m = report_.metrics;
  m["ticks"] = report_.ticks.size();
  m["ood_ticks"] = ood;
  m["imagined_ticks"] = imagined;
  m["stop_ticks"] = stopped;
  if (env_->id() == "pour") {
    const auto s = env::PourState::from_full(report_.final_snapshot);
    const auto& cfg = dynamic_cast<const env::PourEnv&>(*env_).config();
    m["pour_error"] = env::pour_error(s.bins, cfg.target_per_bin);
    m["bins"] = s.bins;
    m["lost"] = s.lost;
    m["remaining"] = s.remaining;
  }
}

EpisodeReport run_episode(const env::Environment& prototype, const ExecutorSetup& setup, UserModel& user,
                          std::uint64_t seed, const EpisodeStart& start) {
  PartitionedExecutor ex(prototype.clone(), setup);
  ex.reset(seed, start);
  user.reset(seed);
  while (!ex.done()) ex.step(user.act(ex.observe(), ex.tick()));
  EpisodeReport r = ex.report();
  r.metadata["user"] = user.to_json();
  return r;
}

EpisodeReport replay_episode(const env::Environment& prototype, const ExecutorSetup& setup, const EpisodeReport& logged) {
  PartitionedExecutor ex(prototype.clone(), setup);
  ex.reset_to_snapshot(logged.initial_snapshot, logged.seed);
  for (const auto& u : logged.user_inputs()) {
    if (ex.done()) break;
    ex.step(u);
  }
  EpisodeReport r = ex.report();
  if (logged.metadata.contains("user")) r.metadata["user"] = logged.metadata["user"];
  return r;
}

double expectation_alignment(const EpisodeReport& report, const ExpectationModel& model,
                             const env::Environment& prototype) {
  if (report.ticks.empty()) throw Error("expectation_alignment: empty trajectory");
  auto env = prototype.clone();
  double sum = 0.0;
  for (const auto& t : report.ticks) {
    env->restore(t.snapshot, t.tick);
    sum += model.distance(model.predict(*env, t.state, t.user), t.next_state);
  }
  return sum / static_cast<double>(report.ticks.size());
}

CounterfactualPair counterfactual(const TickRecord& t, const ExecutorSetup& setup, const env::Environment& prototype) {
  auto env = prototype.clone();
  env->restore(t.snapshot, t.tick);
  const auto& p = setup.partition;
  CounterfactualPair out;
  out.with_policy_state = env->preview(combine(t.user, mask_to_robot(setup.policy->act(t.policy_state, true), p), p));
  out.with_real_state = env->preview(combine(t.user, mask_to_robot(setup.policy->act(t.state, true), p), p));
  return out;
}

}  // namespace ioda::pc
