#include "ioda/store/collect.hpp"

namespace ioda::store {

std::uint64_t episode_seed(std::uint64_t collection_seed, std::size_t i) {
  // splitmix64 of the pair
  std::uint64_t z = collection_seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(i) + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RolloutHistory collect(const learn::GaussianPolicy& policy, const env::Environment& env, std::size_t n,
                       std::uint64_t seed) {
  if (n == 0) throw Error("collect: need at least one episode");
  if (policy.state_dim() != env.state_dim() || policy.action_dim() != env.action_dim())
    throw DimensionError("collect: policy and environment dimensions differ");
  auto e = env.clone();
  RolloutHistory history(env.state_dim(), env.action_dim());
  for (std::size_t i = 0; i < n; ++i) {
    Rollout r;
    r.episode_id = i;
    r.seed = episode_seed(seed, i);
    StateVector s = e->reset(r.seed);
    env::StepResult step;
    do {
      const ActionVector a = policy.act(s, true);
      step = e->step(a);
      r.states.push_back(s);
      r.actions.push_back(a);
      r.rewards.push_back(step.reward);
      s = step.next_state;
    } while (!step.done);
    r.terminal = step.info.goal_reached;
    history.add(std::move(r));
  }
  return history;
}

}  // namespace ioda::store
