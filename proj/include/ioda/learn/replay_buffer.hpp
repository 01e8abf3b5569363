#pragma once

#include "ioda/core/types.hpp"

#include <random>
#include <vector>

namespace ioda::learn {

struct TransitionBatch {
  Eigen::MatrixXd states;       // n x B (normalized)
  Eigen::MatrixXd actions;      // k x B (normalized active dims)
  Eigen::VectorXd rewards;      // B
  Eigen::MatrixXd next_states;  // n x B
  Eigen::VectorXd not_done;     // B, 0 where the transition was terminal
};

/// Fixed-capacity ring buffer of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim);

  void add(const Eigen::VectorXd& s, const Eigen::VectorXd& a, double r, const Eigen::VectorXd& s2, bool terminal);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const;
  TransitionBatch gather(const std::vector<std::size_t>& indices) const;
  TransitionBatch sample(std::size_t batch, std::mt19937_64& rng) const { return gather(sample_indices(batch, rng)); }

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;
  Eigen::MatrixXd states_;
  Eigen::MatrixXd actions_;
  Eigen::VectorXd rewards_;
  Eigen::MatrixXd next_states_;
  Eigen::VectorXd not_done_;
};

}  // namespace ioda::learn
