#include "ioda/learn/sac.hpp"

#include "ioda/core/digest.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace ioda::learn {

namespace {

constexpr double kSquashEps = 1e-6;

std::vector<nn::Activation> hidden_activations(std::size_t hidden_layers) {
  std::vector<nn::Activation> acts(hidden_layers, nn::Activation::relu);
  acts.push_back(nn::Activation::identity);
  return acts;
}

std::vector<bool> resolve_trained_dims(const SacConfig& cfg, std::size_t action_dim) {
  if (cfg.trained_dims.empty()) return std::vector<bool>(action_dim, true);
  if (cfg.trained_dims.size() != action_dim) throw DimensionError("SacConfig: trained_dims length != action dim");
  return cfg.trained_dims;
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("SacConfig: gamma must be in (0,1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw Error("SacConfig: tau must be in (0,1]");
  if (batch_size == 0 || replay_capacity < batch_size) throw Error("SacConfig: replay smaller than a batch");
  if (hidden.empty()) throw Error("SacConfig: need at least one hidden layer");
  if (initial_alpha <= 0.0) throw Error("SacConfig: initial alpha must be positive");
  if (eval_interval == 0 || eval_episodes == 0) throw Error("SacConfig: evaluation settings must be positive");
}

json SacConfig::to_json() const {
  json j{{"hidden", hidden},
         {"gamma", gamma},
         {"tau", tau},
         {"actor_lr", actor_lr},
         {"critic_lr", critic_lr},
         {"alpha_lr", alpha_lr},
         {"initial_alpha", initial_alpha},
         {"replay_capacity", replay_capacity},
         {"batch_size", batch_size},
         {"total_steps", total_steps},
         {"warmup_steps", warmup_steps},
         {"gradient_steps", gradient_steps},
         {"min_steps", min_steps},
         {"eval_interval", eval_interval},
         {"eval_episodes", eval_episodes},
         {"success_gate", success_gate},
         {"seed", seed},
         {"trained_dims", trained_dims}};
  j["target_entropy"] = target_entropy ? json(*target_entropy) : json(nullptr);
  return j;
}

std::string SacConfig::digest() const { return digest_hex(to_json().dump()); }

SacConfig sac_config_from_json(const json& j) {
  SacConfig c;
  auto opt = [&](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  opt("hidden", c.hidden);
  opt("gamma", c.gamma);
  opt("tau", c.tau);
  opt("actor_lr", c.actor_lr);
  opt("critic_lr", c.critic_lr);
  opt("alpha_lr", c.alpha_lr);
  opt("initial_alpha", c.initial_alpha);
  opt("replay_capacity", c.replay_capacity);
  opt("batch_size", c.batch_size);
  opt("total_steps", c.total_steps);
  opt("warmup_steps", c.warmup_steps);
  opt("gradient_steps", c.gradient_steps);
  opt("min_steps", c.min_steps);
  opt("eval_interval", c.eval_interval);
  opt("eval_episodes", c.eval_episodes);
  opt("success_gate", c.success_gate);
  opt("seed", c.seed);
  opt("trained_dims", c.trained_dims);
  if (j.contains("target_entropy") && !j.at("target_entropy").is_null())
    c.target_entropy = j.at("target_entropy").get<double>();
  c.validate();
  return c;
}

json TrainingReport::to_json() const {
  json curve_j = json::array();
  for (const auto& e : curve) {
    curve_j.push_back({{"step", e.step},
                       {"episodes", e.episodes},
                       {"recent_return", e.recent_return},
                       {"eval_success", e.eval_success},
                       {"alpha", e.alpha},
                       {"entropy", e.entropy},
                       {"critic_loss", e.critic_loss},
                       {"actor_loss", e.actor_loss}});
  }
  return json{{"steps", steps},
              {"final_success", final_success},
              {"gate_passed", gate_passed},
              {"target_entropy", target_entropy},
              {"late_entropy", late_entropy},
              {"curve", std::move(curve_j)}};
}

SacLearner::SacLearner(const env::Environment& env, SacConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
  cfg_.validate();
  const std::vector<bool> active = resolve_trained_dims(cfg_, env.action_dim());
  const std::size_t k = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
  const std::size_t n = env.state_dim();

  std::vector<std::size_t> actor_dims{n};
  actor_dims.insert(actor_dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  actor_dims.push_back(2 * k);
  std::vector<std::size_t> critic_dims{n + k};
  critic_dims.insert(critic_dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  critic_dims.push_back(1);
  const auto acts = hidden_activations(cfg_.hidden.size());

  policy_ = GaussianPolicy(nn::DenseNet(actor_dims, acts, false, rng_), env.action_bounds(), env.state_offset(),
                           env.state_scale(), active);
  q1_ = nn::DenseNet(critic_dims, acts, false, rng_);
  q2_ = nn::DenseNet(critic_dims, acts, false, rng_);
  t1_ = q1_;
  t2_ = q2_;

  actor_opt_ = nn::Adam(policy_.actor().parameter_count(), {cfg_.actor_lr});
  q1_opt_ = nn::Adam(q1_.parameter_count(), {cfg_.critic_lr});
  q2_opt_ = nn::Adam(q2_.parameter_count(), {cfg_.critic_lr});
  alpha_opt_ = nn::Adam(1, {cfg_.alpha_lr});
  log_alpha_ = Eigen::VectorXd::Constant(1, std::log(cfg_.initial_alpha));
  target_entropy_ = cfg_.target_entropy.value_or(-static_cast<double>(k));
}

double SacLearner::alpha() const { return std::exp(log_alpha_[0]); }

Eigen::MatrixXd SacLearner::standard_noise(Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(policy_.active_count()), cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = normal(rng_);
  return m;
}

Eigen::MatrixXd SacLearner::critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

double SacLearner::critic_loss(const TransitionBatch& batch, const Eigen::MatrixXd& next_noise,
                               Eigen::VectorXd* grad1, Eigen::VectorXd* grad2) const {
  const auto b = static_cast<double>(batch.states.cols());
  const SquashedSample next = policy_.sample(batch.next_states, next_noise);
  const Eigen::MatrixXd next_in = critic_input(batch.next_states, next.action);
  const Eigen::RowVectorXd tq = t1_.forward(next_in).cwiseMin(t2_.forward(next_in));
  const Eigen::VectorXd soft_value = tq.transpose() - alpha() * next.log_prob;
  const Eigen::VectorXd y = batch.rewards + cfg_.gamma * batch.not_done.cwiseProduct(soft_value);

  const Eigen::MatrixXd in = critic_input(batch.states, batch.actions);
  double total = 0.0;
  auto one = [&](const nn::DenseNet& q, Eigen::VectorXd* grad) {
    nn::Tape tape;
    const Eigen::VectorXd err = q.forward(in, tape).transpose() - y;
    total += err.squaredNorm() / b;
    if (grad) *grad = q.backward(tape, (2.0 / b) * err.transpose()).params;
  };
  one(q1_, grad1);
  one(q2_, grad2);
  return total;
}

double SacLearner::actor_loss(const TransitionBatch& batch, const Eigen::MatrixXd& noise, Eigen::VectorXd* grad,
                              Eigen::VectorXd* log_probs) const {
  const auto b = static_cast<double>(batch.states.cols());
  const double a = alpha();
  nn::Tape actor_tape;
  const SquashedSample s = policy_.sample(batch.states, noise, grad ? &actor_tape : nullptr);
  const Eigen::MatrixXd in = critic_input(batch.states, s.action);

  nn::Tape tape1, tape2;
  const Eigen::RowVectorXd v1 = q1_.forward(in, tape1);
  const Eigen::RowVectorXd v2 = q2_.forward(in, tape2);
  const Eigen::RowVectorXd qmin = v1.cwiseMin(v2);
  if (log_probs) *log_probs = s.log_prob;
  const double loss = (a * s.log_prob.transpose() - qmin).sum() / b;
  if (!grad) return loss;

  // dQmin/da for each sample from whichever critic is smaller.
  const Eigen::RowVectorXd pick1 = (v1.array() <= v2.array()).cast<double>().matrix();
  const Eigen::MatrixXd g1 = q1_.backward_input(tape1, pick1);
  const Eigen::MatrixXd g2 = q2_.backward_input(tape2, Eigen::RowVectorXd::Ones(v2.size()) - pick1);
  const auto n = batch.states.rows();
  const auto k = s.action.rows();
  const Eigen::ArrayXXd dq_da = (g1.bottomRows(k) + g2.bottomRows(k)).array();

  const Eigen::ArrayXXd t = s.action.array();
  const Eigen::ArrayXXd one_minus_t2 = 1.0 - t.square();
  const Eigen::ArrayXXd std_dev = s.log_std.array().exp();
  const Eigen::ArrayXXd dl_du = (a * 2.0 * t * one_minus_t2 / (one_minus_t2 + kSquashEps) - dq_da * one_minus_t2) / b;
  Eigen::ArrayXXd dl_dlogstd = -a / b + dl_du * std_dev * s.noise.array();
  dl_dlogstd *= (1.0 - s.clipped.array());

  Eigen::MatrixXd upstream(2 * k, batch.states.cols());
  upstream.topRows(k) = dl_du.matrix();
  upstream.bottomRows(k) = dl_dlogstd.matrix();
  *grad = policy_.actor().backward(actor_tape, upstream).params;
  (void)n;
  return loss;
}

SacLearner::UpdateStats SacLearner::update(const TransitionBatch& batch) {
  UpdateStats stats;
  const auto cols = batch.states.cols();

  Eigen::VectorXd g1, g2;
  stats.critic_loss = critic_loss(batch, standard_noise(cols), &g1, &g2);
  Eigen::VectorXd p1 = q1_.parameters(), p2 = q2_.parameters();
  q1_opt_.step(p1, g1);
  q2_opt_.step(p2, g2);
  q1_.set_parameters(p1);
  q2_.set_parameters(p2);

  Eigen::VectorXd ga, log_probs;
  stats.actor_loss = actor_loss(batch, standard_noise(cols), &ga, &log_probs);
  Eigen::VectorXd pa = policy_.actor().parameters();
  actor_opt_.step(pa, ga);
  policy_.actor().set_parameters(pa);

  stats.entropy = -log_probs.mean();
  Eigen::VectorXd alpha_grad(1);
  alpha_grad[0] = -(log_probs.array() + target_entropy_).mean();
  alpha_opt_.step(log_alpha_, alpha_grad);

  soft_update(cfg_.tau);
  return stats;
}

void SacLearner::soft_update(double tau) {
  if (tau >= 1.0) {
    t1_ = q1_;
    t2_ = q2_;
    return;
  }
  t1_.set_parameters(tau * q1_.parameters() + (1.0 - tau) * t1_.parameters());
  t2_.set_parameters(tau * q2_.parameters() + (1.0 - tau) * t2_.parameters());
}

double evaluate_success(const GaussianPolicy& policy, const env::Environment& env, std::size_t episodes,
                        std::uint64_t seed) {
  auto e = env.clone();
  std::size_t successes = 0;
  for (std::size_t i = 0; i < episodes; ++i) {
    StateVector s = e->reset(seed + i);
    bool spilled = false;
    env::StepResult r;
    do {
      r = e->step(policy.act(s, true));
      spilled = spilled || r.info.spilling;
      s = r.next_state;
    } while (!r.done);
    if (r.info.goal_reached && !spilled) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(episodes);
}

TrainResult train(env::Environment& train_env, const env::Environment& eval_env, const SacConfig& cfg) {
  SacLearner learner(train_env, cfg);
  const GaussianPolicy& policy = learner.policy();
  ReplayBuffer buffer(cfg.replay_capacity, train_env.state_dim(), policy.active_count());
  std::mt19937_64 env_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const std::uint64_t eval_seed = cfg.seed * 1000003ULL + 17;

  TrainingReport report;
  report.target_entropy = learner.target_entropy();
  const auto k = static_cast<Eigen::Index>(policy.active_count());

  StateVector s = train_env.reset(env_rng());
  double episode_return = 0.0;
  std::deque<double> recent_returns;
  std::size_t episodes = 0;
  SacLearner::UpdateStats last{};
  std::vector<double> entropy_log;
  entropy_log.reserve(cfg.total_steps * cfg.gradient_steps);

  std::size_t step = 0;
  while (step < cfg.total_steps) {
    Eigen::VectorXd a_norm(k);
    if (step < cfg.warmup_steps) {
      for (Eigen::Index i = 0; i < k; ++i) a_norm[i] = uniform(learner.rng());
    } else {
      const Eigen::MatrixXd x = policy.normalize_states(s);
      a_norm = policy.sample(x, learner.standard_noise(1)).action.col(0);
    }
    const env::StepResult r = train_env.step(policy.to_env_action(a_norm));
    ++step;
    const bool terminal = r.done && !r.info.timeout;
    buffer.add(policy.normalize_states(s).col(0), a_norm, r.reward, policy.normalize_states(r.next_state).col(0),
               terminal);
    episode_return += r.reward;
    s = r.next_state;
    if (r.done) {
      ++episodes;
      recent_returns.push_back(episode_return);
      if (recent_returns.size() > 20) recent_returns.pop_front();
      episode_return = 0.0;
      s = train_env.reset(env_rng());
    }

    if (step >= cfg.warmup_steps && buffer.size() >= cfg.batch_size) {
      for (std::size_t g = 0; g < cfg.gradient_steps; ++g) {
        last = learner.update(buffer.sample(cfg.batch_size, learner.rng()));
        entropy_log.push_back(last.entropy);
      }
    }

    const bool eval_now = step >= cfg.min_steps && (step % cfg.eval_interval == 0 || step == cfg.total_steps);
    if (step % 1000 == 0 || eval_now) {
      TrainingLogEntry e;
      e.step = step;
      e.episodes = episodes;
      e.recent_return = recent_returns.empty()
                            ? 0.0
                            : std::accumulate(recent_returns.begin(), recent_returns.end(), 0.0) /
                                  static_cast<double>(recent_returns.size());
      e.alpha = learner.alpha();
      e.entropy = last.entropy;
      e.critic_loss = last.critic_loss;
      e.actor_loss = last.actor_loss;
      if (eval_now) {
        e.eval_success = evaluate_success(policy, eval_env, cfg.eval_episodes, eval_seed);
        report.final_success = e.eval_success;
      }
      report.curve.push_back(e);
      if (eval_now && e.eval_success >= cfg.success_gate) {
        report.gate_passed = true;
        break;
      }
    }
  }

  report.steps = step;
  if (!entropy_log.empty()) {
    const std::size_t tail = std::max<std::size_t>(1, entropy_log.size() / 10);
    report.late_entropy = std::accumulate(entropy_log.end() - static_cast<std::ptrdiff_t>(tail), entropy_log.end(), 0.0) /
                          static_cast<double>(tail);
  }
  if (!report.gate_passed) {
    throw TrainingFailure("SAC training did not reach the success gate (" + std::to_string(report.final_success) +
                              " < " + std::to_string(cfg.success_gate) + ") within " + std::to_string(step) +
                              " steps",
                          std::move(report));
  }
  return TrainResult{learner.policy(), std::move(report)};
}

}  // namespace ioda::learn
