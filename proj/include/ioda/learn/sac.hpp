#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/learn/gaussian_policy.hpp"
#include "ioda/learn/replay_buffer.hpp"
#include "ioda/nn/adam.hpp"

#include <optional>

namespace ioda::learn {

struct SacConfig {
  std::vector<std::size_t> hidden{64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha_lr = 3e-4;
  double initial_alpha = 0.1;
  /// Defaults to minus the number of trained action dimensions.
  std::optional<double> target_entropy;
  std::size_t replay_capacity = 100000;
  std::size_t batch_size = 128;
  std::size_t total_steps = 40000;
  std::size_t warmup_steps = 1000;
  std::size_t gradient_steps = 1;
  /// Evaluation (and early exit once the gate passes) starts after this many env steps.
  std::size_t min_steps = 10000;
  std::size_t eval_interval = 5000;
  std::size_t eval_episodes = 100;
  double success_gate = 0.95;
  std::uint64_t seed = 1;
  /// Action dimensions the actor controls; the rest are held at the bound center. Empty = all.
  std::vector<bool> trained_dims;

  void validate() const;
  json to_json() const;
  std::string digest() const;
};

SacConfig sac_config_from_json(const json& j);

struct TrainingLogEntry {
  std::size_t step = 0;
  std::size_t episodes = 0;
  double recent_return = 0.0;
  double eval_success = -1.0;  // -1 when no evaluation ran at this entry
  double alpha = 0.0;
  double entropy = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

struct TrainingReport {
  std::vector<TrainingLogEntry> curve;
  std::size_t steps = 0;
  double final_success = 0.0;
  bool gate_passed = false;
  double target_entropy = 0.0;
  /// Mean batch entropy estimate over the last 10% of gradient updates.
  double late_entropy = 0.0;
  json to_json() const;
};

class TrainingFailure : public Error {
 public:
  TrainingFailure(const std::string& what, TrainingReport report) : Error(what), report_(std::move(report)) {}
  const TrainingReport& report() const { return report_; }

 private:
  TrainingReport report_;
};

/// Soft actor-critic with twin critics, Polyak-averaged targets and automatic temperature tuning.
class SacLearner {
 public:
  SacLearner(const env::Environment& env, SacConfig cfg);

  /// Sum of both critics' mean squared TD errors on a batch. Gradients w.r.t. each critic's
  /// parameters are written when the pointers are non-null. `next_noise` drives the next-action draw.
  double critic_loss(const TransitionBatch& batch, const Eigen::MatrixXd& next_noise, Eigen::VectorXd* grad1,
                     Eigen::VectorXd* grad2) const;

  /// mean(alpha * log pi(a|s) - min Q(s, a)) with reparameterized actions from `noise`.
  double actor_loss(const TransitionBatch& batch, const Eigen::MatrixXd& noise, Eigen::VectorXd* grad,
                    Eigen::VectorXd* log_probs = nullptr) const;

  struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double entropy = 0.0;
  };
  UpdateStats update(const TransitionBatch& batch);
  void soft_update(double tau);

  const GaussianPolicy& policy() const { return policy_; }
  GaussianPolicy& policy() { return policy_; }
  const nn::DenseNet& critic(int i) const { return i == 0 ? q1_ : q2_; }
  nn::DenseNet& critic(int i) { return i == 0 ? q1_ : q2_; }
  const nn::DenseNet& target(int i) const { return i == 0 ? t1_ : t2_; }
  double alpha() const;
  double target_entropy() const { return target_entropy_; }
  const SacConfig& config() const { return cfg_; }
  std::mt19937_64& rng() { return rng_; }

  Eigen::MatrixXd standard_noise(Eigen::Index cols);

 private:
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) const;

  SacConfig cfg_;
  std::mt19937_64 rng_;
  GaussianPolicy policy_;
  nn::DenseNet q1_, q2_, t1_, t2_;
  nn::Adam actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
  Eigen::VectorXd log_alpha_;
  double target_entropy_ = 0.0;
};

struct TrainResult {
  GaussianPolicy policy;
  TrainingReport report;
};

/// Runs SAC on `train_env` and gates the result on deterministic-policy success in `eval_env`.
/// Throws TrainingFailure (carrying the full report) when the gate is not met within the budget.
TrainResult train(env::Environment& train_env, const env::Environment& eval_env, const SacConfig& cfg);

/// Fraction of episodes (seeds seed, seed+1, ...) that reach the goal without any spilling tick.
double evaluate_success(const GaussianPolicy& policy, const env::Environment& env, std::size_t episodes,
                        std::uint64_t seed);

}  // namespace ioda::learn
