#pragma once

// Small untrained-but-deterministic artifacts for contract tests.

#include "ioda/env/nav_env.hpp"
#include "ioda/env/pour_env.hpp"
#include "ioda/learn/sac.hpp"
#include "ioda/ood/knn.hpp"
#include "ioda/pc/executor.hpp"
#include "ioda/store/collect.hpp"

#include <memory>

namespace ioda::fixture {

struct Study {
  std::shared_ptr<learn::GaussianPolicy> policy;
  std::shared_ptr<store::RolloutHistory> history;
  std::shared_ptr<store::StateIndex> index;
  std::shared_ptr<ood::KnnDetector> knn;
};

inline Study make_study(const env::Environment& env, std::vector<bool> trained_dims = {}, std::size_t episodes = 20,
                        std::uint64_t seed = 3) {
  learn::SacConfig cfg;
  cfg.hidden = {16, 16};
  cfg.seed = seed;
  cfg.trained_dims = std::move(trained_dims);
  learn::SacLearner learner(env, cfg);
  Study s;
  s.policy = std::make_shared<learn::GaussianPolicy>(learner.policy());
  s.history = std::make_shared<store::RolloutHistory>(store::collect(*s.policy, env, episodes, seed + 100));
  s.index = std::make_shared<store::StateIndex>(store::StateIndex::from_history(*s.history));
  s.knn = std::make_shared<ood::KnnDetector>(ood::fit_knn(s.index, 0.99));
  return s;
}

inline pc::Condition condition_for(pc::ConditionKind k, const Study& s, pc::FailurePredicate f) {
  switch (k) {
    case pc::ConditionKind::rl: return pc::Condition::rl(s.knn);
    case pc::ConditionKind::stop: return pc::Condition::stop(f, s.knn);
    case pc::ConditionKind::ioda: return pc::Condition::ioda(s.knn, s.index);
  }
  return pc::Condition::rl();
}

inline pc::ExecutorSetup setup_for(pc::ConditionKind k, const Study& s, pc::AxisPartition p,
                                   pc::FailurePredicate f, bool with_expectation = true) {
  pc::ExecutorSetup e;
  e.policy = s.policy;
  e.partition = std::move(p);
  e.condition = condition_for(k, s, f);
  if (with_expectation) e.expectation = std::make_shared<pc::ExpectationModel>(s.index, s.policy, e.partition);
  return e;
}

}  // namespace ioda::fixture
