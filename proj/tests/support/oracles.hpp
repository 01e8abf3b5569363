#pragma once

// Independent reference computations shared by the unit and acceptance suites.

#include "ioda/learn/sac.hpp"
#include "ioda/nn/dense_net.hpp"
#include "ioda/store/state_index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace ioda::oracle {

inline double activate(nn::Activation a, double z) {
  switch (a) {
    case nn::Activation::relu: return z > 0 ? z : 0.0;
    case nn::Activation::tanh: return std::tanh(z);
    case nn::Activation::identity: return z;
  }
  return z;
}

/// Straight-line loops over the layer list, no Eigen products.
inline Eigen::VectorXd naive_forward(const nn::DenseNet& net, const Eigen::VectorXd& x,
                                     std::vector<std::vector<double>>* pre = nullptr) {
  std::vector<double> cur(x.data(), x.data() + x.size());
  for (const auto& layer : net.layers()) {
    std::vector<double> next(static_cast<std::size_t>(layer.weight.rows()), 0.0), z(next.size());
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      double s = layer.bias.size() ? layer.bias[r] : 0.0;
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) s += layer.weight(r, c) * cur[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = s;
      next[static_cast<std::size_t>(r)] = activate(layer.activation, s);
    }
    if (pre && layer.activation == nn::Activation::relu) pre->push_back(z);
    cur = std::move(next);
  }
  return Eigen::Map<Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(cur.size()));
}

/// |a - n| / max(|a|, |n|, floor): relative error with a floor for entries that are both ~0.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric, double floor = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) worst = std::max(worst, relative_error(analytic[i], numeric[i], floor));
  return worst;
}

/// Central differences of a scalar function of a flat vector.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                          double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

struct GradCheckCase {
  nn::DenseNet net;
  Eigen::MatrixXd x;
  Eigen::MatrixXd upstream;
};

/// Random architecture, activations, bias setting, batch and inputs. Inputs are redrawn until every
/// relu pre-activation is at least `kink_margin` away from zero so differences never straddle a kink.
inline GradCheckCase random_gradcheck_case(std::mt19937_64& rng, double kink_margin = 1e-3) {
  std::uniform_int_distribution<int> depth(1, 3), width(1, 6), batch(1, 4), act(0, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const int layers = depth(rng);
  std::vector<std::size_t> dims{static_cast<std::size_t>(width(rng))};
  std::vector<nn::Activation> acts;
  for (int l = 0; l < layers; ++l) {
    dims.push_back(static_cast<std::size_t>(width(rng)));
    acts.push_back(static_cast<nn::Activation>(act(rng)));
  }
  GradCheckCase c{nn::DenseNet(dims, acts, coin(rng), rng), {}, {}};
  const auto b = batch(rng);
  c.x.resize(static_cast<Eigen::Index>(dims.front()), b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (int attempt = 0;; ++attempt) {
      Eigen::VectorXd col(c.x.rows());
      for (auto& v : col) v = normal(rng);
      std::vector<std::vector<double>> pre;
      naive_forward(c.net, col, &pre);
      bool clear = true;
      for (const auto& layer : pre)
        for (double z : layer) clear = clear && std::abs(z) > kink_margin;
      if (clear || attempt > 1000) {
        c.x.col(j) = col;
        break;
      }
    }
  }
  c.upstream.resize(static_cast<Eigen::Index>(dims.back()), b);
  for (auto& v : c.upstream.reshaped()) v = normal(rng);
  return c;
}

struct GradCheckResult {
  double params = 0.0;
  double input = 0.0;
};

/// Backward vs central differences of sum(upstream .* forward(x)).
inline GradCheckResult check_net_gradients(const GradCheckCase& c, double h = 1e-5) {
  const nn::Gradients g = c.net.backward(c.x, c.upstream);
  nn::DenseNet probe = c.net;
  auto loss_params = [&](const Eigen::VectorXd& p) {
    probe.set_parameters(p);
    return (c.upstream.array() * probe.forward(c.x).array()).sum();
  };
  GradCheckResult r;
  r.params = max_relative_error(g.params, central_difference(loss_params, c.net.parameters(), h));
  auto loss_input = [&](const Eigen::VectorXd& flat) {
    const Eigen::MatrixXd x = flat.reshaped(c.x.rows(), c.x.cols());
    return (c.upstream.array() * c.net.forward(x).array()).sum();
  };
  const Eigen::VectorXd flat_x = c.x.reshaped();
  r.input = max_relative_error(g.input.reshaped(), central_difference(loss_input, flat_x, h));
  return r;
}

struct SacGradCheck {
  double critic = 0.0;
  double actor = 0.0;
};

/// Central differences of the composed SAC losses on a frozen random minibatch with frozen noise.
inline SacGradCheck check_sac_gradients(const env::Environment& env, std::uint64_t seed, double h = 1e-5) {
  learn::SacConfig cfg;
  cfg.hidden = {16, 16};
  cfg.seed = seed;
  cfg.initial_alpha = 0.2;
  learn::SacLearner learner(env, cfg);
  const auto n = static_cast<Eigen::Index>(env.state_dim());
  const auto k = static_cast<Eigen::Index>(learner.policy().active_count());
  const Eigen::Index b = 8;
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  learn::TransitionBatch batch;
  batch.states.resize(n, b);
  batch.next_states.resize(n, b);
  batch.actions.resize(k, b);
  batch.rewards.resize(b);
  batch.not_done.resize(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      batch.states(i, j) = u(rng);
      batch.next_states(i, j) = u(rng);
    }
    for (Eigen::Index i = 0; i < k; ++i) batch.actions(i, j) = 0.9 * u(rng);
    batch.rewards[j] = 2.0 * u(rng);
    batch.not_done[j] = j % 4 == 3 ? 0.0 : 1.0;
  }
  const Eigen::MatrixXd next_noise = learner.standard_noise(b);
  const Eigen::MatrixXd noise = learner.standard_noise(b);

  SacGradCheck r;
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd g1, g2;
    learner.critic_loss(batch, next_noise, &g1, &g2);
    const Eigen::VectorXd p0 = learner.critic(c).parameters();
    auto f = [&](const Eigen::VectorXd& p) {
      learner.critic(c).set_parameters(p);
      return learner.critic_loss(batch, next_noise, nullptr, nullptr);
    };
    const Eigen::VectorXd fd = central_difference(f, p0, h);
    learner.critic(c).set_parameters(p0);
    r.critic = std::max(r.critic, max_relative_error(c == 0 ? g1 : g2, fd));
  }
  Eigen::VectorXd ga;
  learner.actor_loss(batch, noise, &ga);
  const Eigen::VectorXd p0 = learner.policy().actor().parameters();
  auto f = [&](const Eigen::VectorXd& p) {
    learner.policy().actor().set_parameters(p);
    return learner.actor_loss(batch, noise, nullptr);
  };
  const Eigen::VectorXd fd = central_difference(f, p0, h);
  learner.policy().actor().set_parameters(p0);
  r.actor = max_relative_error(ga, fd);
  return r;
}

/// Brute-force argmin with lowest-index tie-break, written without the index's helpers.
inline std::size_t brute_force_nearest(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                                       const Eigen::VectorXd& q) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    double d = 0.0;
    for (Eigen::Index k = 0; k < points.rows(); ++k) d += weights[k] * std::abs(points(k, i) - q[k]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

/// Independent per-bin summation for the pour error.
inline double pour_error_reference(const std::array<double, 5>& bins, double w) {
  double total = 0.0;
  for (double b : bins)
    if (b < w) total += w - b;
  return total;
}

}  // namespace ioda::oracle
