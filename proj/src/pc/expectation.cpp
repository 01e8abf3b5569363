#include "ioda/pc/expectation.hpp"

namespace ioda::pc {

ExpectationModel::ExpectationModel(std::shared_ptr<const store::StateIndex> store,
                                   std::shared_ptr<const learn::GaussianPolicy> policy, AxisPartition partition)
    : store_(std::move(store)), policy_(std::move(policy)), partition_(std::move(partition)) {
  if (!store_ || store_->size() == 0) throw Error("ExpectationModel: empty store");
  if (!policy_) throw Error("ExpectationModel: no policy");
  if (store_->dim() != policy_->state_dim()) throw DimensionError("ExpectationModel: store/policy state dimension");
  if (partition_.dim() != policy_->action_dim()) throw DimensionError("ExpectationModel: partition dimension");
}

ActionVector ExpectationModel::expected_action(const StateVector& s) const {
  const store::Match m = store_->nearest(s);
  return mask_to_robot(policy_->act(store_->point(m.index), true), partition_);
}

StateVector ExpectationModel::predict(const env::Environment& env, const StateVector& s, const ActionVector& u) const {
  return env.preview(combine(mask_to_user(u, partition_), expected_action(s), partition_));
}

}  // namespace ioda::pc
