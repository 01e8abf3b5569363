#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/learn/gaussian_policy.hpp"
#include "ioda/pc/partition.hpp"
#include "ioda/store/state_index.hpp"

#include <memory>

namespace ioda::pc {

/// User expectation model W(s) = T(s, u o pi*(nearest(s))): the robot is expected to act as it
/// did in the closest state the user has seen. A model, not ground truth.
class ExpectationModel {
 public:
  ExpectationModel(std::shared_ptr<const store::StateIndex> store, std::shared_ptr<const learn::GaussianPolicy> policy,
                   AxisPartition partition);

  /// `env` must currently be in the state whose observation is `s`.
  StateVector predict(const env::Environment& env, const StateVector& s, const ActionVector& u) const;
  /// Robot action the user expects at `s` (full action vector, robot dims only).
  ActionVector expected_action(const StateVector& s) const;
  double distance(const StateVector& a, const StateVector& b) const { return store_->distance(a, b); }

  const store::StateIndex& store() const { return *store_; }

 private:
  std::shared_ptr<const store::StateIndex> store_;
  std::shared_ptr<const learn::GaussianPolicy> policy_;
  AxisPartition partition_;
};

}  // namespace ioda::pc
