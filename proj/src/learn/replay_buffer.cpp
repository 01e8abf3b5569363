#include "ioda/learn/replay_buffer.hpp"

namespace ioda::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim)
    : capacity_(capacity),
      states_(static_cast<Eigen::Index>(state_dim), static_cast<Eigen::Index>(capacity)),
      actions_(static_cast<Eigen::Index>(action_dim), static_cast<Eigen::Index>(capacity)),
      rewards_(static_cast<Eigen::Index>(capacity)),
      next_states_(static_cast<Eigen::Index>(state_dim), static_cast<Eigen::Index>(capacity)),
      not_done_(static_cast<Eigen::Index>(capacity)) {
  if (capacity == 0) throw Error("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::add(const Eigen::VectorXd& s, const Eigen::VectorXd& a, double r, const Eigen::VectorXd& s2,
                       bool terminal) {
  require_dim(s, static_cast<std::size_t>(states_.rows()), "ReplayBuffer::add state");
  require_dim(a, static_cast<std::size_t>(actions_.rows()), "ReplayBuffer::add action");
  require_dim(s2, static_cast<std::size_t>(states_.rows()), "ReplayBuffer::add next state");
  const auto i = static_cast<Eigen::Index>(head_);
  states_.col(i) = s;
  actions_.col(i) = a;
  rewards_[i] = r;
  next_states_.col(i) = s2;
  not_done_[i] = terminal ? 0.0 : 1.0;
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, std::mt19937_64& rng) const {
  if (size_ == 0) throw Error("ReplayBuffer: sampling from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

TransitionBatch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  const auto b = static_cast<Eigen::Index>(indices.size());
  TransitionBatch out{Eigen::MatrixXd(states_.rows(), b), Eigen::MatrixXd(actions_.rows(), b), Eigen::VectorXd(b),
                      Eigen::MatrixXd(states_.rows(), b), Eigen::VectorXd(b)};
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto i = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]);
    if (static_cast<std::size_t>(i) >= size_) throw Error("ReplayBuffer: index out of range");
    out.states.col(j) = states_.col(i);
    out.actions.col(j) = actions_.col(i);
    out.rewards[j] = rewards_[i];
    out.next_states.col(j) = next_states_.col(i);
    out.not_done[j] = not_done_[i];
  }
  return out;
}

}  // namespace ioda::learn
