#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/learn/gaussian_policy.hpp"
#include "ioda/pc/condition.hpp"
#include "ioda/pc/episode_report.hpp"
#include "ioda/pc/expectation.hpp"
#include "ioda/pc/partition.hpp"
#include "ioda/pc/simulated_user.hpp"

#include <functional>
#include <memory>

namespace ioda::pc {

struct ExecutorSetup {
  std::shared_ptr<const learn::GaussianPolicy> policy;
  AxisPartition partition;
  Condition condition;
  std::shared_ptr<const ExpectationModel> expectation;  // optional
  json metadata = json::object();
};

/// Puts the environment into its initial state for a seed; defaults to env.reset(seed).
using EpisodeStart = std::function<StateVector(env::Environment&, std::uint64_t)>;

/// Tick-by-tick partitioned control loop. Per tick: mask the user command to user dims, compute
/// the policy input (substituted under IODA when OOD), act deterministically, zero robot dims under
/// STOP while the failure predicate holds, step the real state with u o a, record.
class PartitionedExecutor {
 public:
  PartitionedExecutor(std::unique_ptr<env::Environment> env, ExecutorSetup setup);

  StateVector reset(std::uint64_t seed, const EpisodeStart& start = {});
  /// Starts from a recorded full snapshot.
  StateVector reset_to_snapshot(const Eigen::VectorXd& snapshot, std::uint64_t seed);
  const TickRecord& step(const ActionVector& user_input);

  bool started() const { return started_; }
  bool done() const { return env_->done(); }
  int tick() const { return env_->tick(); }
  StateVector observe() const { return env_->observe(); }
  /// Policy input the next tick would use.
  EffectiveState peek_effective() const { return effective_state(env_->observe(), setup_.condition); }
  const env::Environment& env() const { return *env_; }
  const ExecutorSetup& setup() const { return setup_; }
  const EpisodeReport& report() const { return report_; }

 private:
  void begin(std::uint64_t seed);
  void finish();

  std::unique_ptr<env::Environment> env_;
  ExecutorSetup setup_;
  EpisodeReport report_;
  env::StepInfo last_info_;
  bool started_ = false;
};

EpisodeReport run_episode(const env::Environment& prototype, const ExecutorSetup& setup, UserModel& user,
                          std::uint64_t seed, const EpisodeStart& start = {});

/// Re-executes a logged episode from its initial snapshot with its logged user inputs.
EpisodeReport replay_episode(const env::Environment& prototype, const ExecutorSetup& setup, const EpisodeReport& logged);

/// Recomputes mean d(W(s_t), s_{t+1}) offline from the recorded snapshots.
double expectation_alignment(const EpisodeReport& report, const ExpectationModel& model,
                             const env::Environment& prototype);

/// Counterfactual next states for a recorded tick: T(s, u o pi(s')) with s' the policy input used
/// and T(s, u o pi(s)) with the real state.
struct CounterfactualPair {
  StateVector with_policy_state;
  StateVector with_real_state;
};
CounterfactualPair counterfactual(const TickRecord& tick, const ExecutorSetup& setup, const env::Environment& prototype);

}  // namespace ioda::pc
