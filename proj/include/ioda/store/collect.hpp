#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/learn/gaussian_policy.hpp"
#include "ioda/store/rollout.hpp"

namespace ioda::store {

/// Seed of the i-th collected episode for a collection seed.
std::uint64_t episode_seed(std::uint64_t collection_seed, std::size_t i);

/// Records `n` deterministic-policy episodes. Each episode is reset from episode_seed(seed, i).
RolloutHistory collect(const learn::GaussianPolicy& policy, const env::Environment& env, std::size_t n,
                       std::uint64_t seed);

}  // namespace ioda::store
