#include "ioda/store/rollout.hpp"

namespace ioda::store {

bool operator==(const Rollout& a, const Rollout& b) {
  if (a.episode_id != b.episode_id || a.seed != b.seed || a.terminal != b.terminal || a.rewards != b.rewards ||
      a.states.size() != b.states.size() || a.actions.size() != b.actions.size())
    return false;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    if (a.states[i].size() != b.states[i].size() || a.states[i] != b.states[i]) return false;
  for (std::size_t i = 0; i < a.actions.size(); ++i)
    if (a.actions[i].size() != b.actions[i].size() || a.actions[i] != b.actions[i]) return false;
  return true;
}

void RolloutHistory::add(Rollout r) {
  if (r.states.empty()) throw Error("RolloutHistory: empty rollout");
  if (r.actions.size() != r.states.size() || r.rewards.size() != r.states.size())
    throw DimensionError("RolloutHistory: states/actions/rewards length mismatch");
  for (const auto& s : r.states) require_dim(s, state_dim_, "RolloutHistory state");
  for (const auto& a : r.actions) require_dim(a, action_dim_, "RolloutHistory action");
  total_states_ += r.states.size();
  episodes_.push_back(std::move(r));
}

Eigen::MatrixXd RolloutHistory::state_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(state_dim_), static_cast<Eigen::Index>(total_states_));
  Eigen::Index c = 0;
  for (const auto& e : episodes_)
    for (const auto& s : e.states) m.col(c++) = s;
  return m;
}

std::vector<StateRef> RolloutHistory::state_refs() const {
  std::vector<StateRef> refs;
  refs.reserve(total_states_);
  for (std::size_t e = 0; e < episodes_.size(); ++e)
    for (std::size_t t = 0; t < episodes_[e].states.size(); ++t) refs.push_back({e, t});
  return refs;
}

bool operator==(const RolloutHistory& a, const RolloutHistory& b) {
  return a.state_dim_ == b.state_dim_ && a.action_dim_ == b.action_dim_ && a.episodes_ == b.episodes_;
}

}  // namespace ioda::store
