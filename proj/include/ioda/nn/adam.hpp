#pragma once

#include "ioda/core/types.hpp"

namespace ioda::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t parameter_count, AdamConfig cfg);

  /// Applies one update in place. A non-finite gradient leaves params and state untouched and throws.
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::uint64_t step_ = 0;
};

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

}  // namespace ioda::nn
