#include "ioda/nn/adam.hpp"

#include <cmath>

namespace ioda::nn {

Adam::Adam(std::size_t parameter_count, AdamConfig cfg)
    : cfg_(cfg),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count))) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  require_dim(params, static_cast<std::size_t>(m_.size()), "Adam::step params");
  require_dim(grads, static_cast<std::size_t>(m_.size()), "Adam::step grads");
  if (!grads.allFinite()) throw NonFiniteGradient("Adam::step: non-finite gradient rejected");

  ++step_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grads;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grads.cwiseProduct(grads);
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(cfg_.beta1, t);
  const double c2 = 1.0 - std::pow(cfg_.beta2, t);
  params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
}

}  // namespace ioda::nn
