#pragma once

#include "ioda/core/types.hpp"

#include <vector>

namespace ioda::store {

struct Rollout {
  std::uint64_t episode_id = 0;
  std::uint64_t seed = 0;
  std::vector<StateVector> states;
  std::vector<ActionVector> actions;
  std::vector<double> rewards;
  bool terminal = false;

  std::size_t steps() const { return states.size(); }
  friend bool operator==(const Rollout& a, const Rollout& b);
};

/// Reference back to where a state was recorded.
struct StateRef {
  std::size_t episode = 0;  // position within the history
  std::size_t step = 0;
  friend bool operator==(const StateRef&, const StateRef&) = default;
};

/// Ordered, append-only set of recorded episodes with a consistent state dimension.
class RolloutHistory {
 public:
  RolloutHistory() = default;
  RolloutHistory(std::size_t state_dim, std::size_t action_dim) : state_dim_(state_dim), action_dim_(action_dim) {}

  void add(Rollout r);

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t size() const { return episodes_.size(); }
  bool empty() const { return episodes_.empty(); }
  std::size_t total_states() const { return total_states_; }
  const std::vector<Rollout>& episodes() const { return episodes_; }
  const Rollout& operator[](std::size_t i) const { return episodes_[i]; }

  /// All recorded states as columns, in (episode, step) insertion order.
  Eigen::MatrixXd state_matrix() const;
  std::vector<StateRef> state_refs() const;

  friend bool operator==(const RolloutHistory& a, const RolloutHistory& b);

 private:
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  std::size_t total_states_ = 0;
  std::vector<Rollout> episodes_;
};

}  // namespace ioda::store
