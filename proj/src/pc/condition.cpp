#include "ioda/pc/condition.hpp"

namespace ioda::pc {

std::string to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::rl: return "RL";
    case ConditionKind::stop: return "STOP";
    case ConditionKind::ioda: return "IODA";
  }
  return "?";
}

ConditionKind condition_kind_from_string(const std::string& s) {
  if (s == "RL" || s == "rl") return ConditionKind::rl;
  if (s == "STOP" || s == "stop") return ConditionKind::stop;
  if (s == "IODA" || s == "ioda") return ConditionKind::ioda;
  throw Error("unknown condition '" + s + "'");
}

std::string to_string(FailurePredicate f) {
  return f == FailurePredicate::spilling ? "spilling" : "outside_workspace";
}

FailurePredicate failure_predicate_from_string(const std::string& s) {
  if (s == "spilling") return FailurePredicate::spilling;
  if (s == "outside_workspace") return FailurePredicate::outside_workspace;
  throw Error("unknown failure predicate '" + s + "'");
}

bool failure_holds(FailurePredicate f, const env::StepInfo& last) {
  return f == FailurePredicate::spilling ? last.spilling : !last.in_workspace;
}

Condition Condition::rl(std::shared_ptr<const ood::OodDetector> detector) {
  Condition c;
  c.kind = ConditionKind::rl;
  c.detector = std::move(detector);
  return c;
}

Condition Condition::stop(FailurePredicate failure, std::shared_ptr<const ood::OodDetector> detector) {
  Condition c;
  c.kind = ConditionKind::stop;
  c.failure = failure;
  c.detector = std::move(detector);
  return c;
}

Condition Condition::ioda(std::shared_ptr<const ood::OodDetector> detector,
                          std::shared_ptr<const store::StateIndex> store) {
  Condition c;
  c.kind = ConditionKind::ioda;
  c.detector = std::move(detector);
  c.store = std::move(store);
  return c;
}

void Condition::validate(std::size_t state_dim) const {
  if (kind == ConditionKind::ioda) {
    if (!detector) throw MissingArtifact("IODA condition needs a fitted detector");
    if (!store || store->size() == 0) throw MissingArtifact("IODA condition needs a non-empty rollout store");
  }
  if (detector && detector->state_dim() != state_dim) throw DimensionError("condition detector state dimension");
  if (store && store->dim() != state_dim) throw DimensionError("condition store state dimension");
}

json Condition::to_json() const {
  json j{{"kind", to_string(kind)}};
  if (kind == ConditionKind::stop) j["failure_predicate"] = to_string(failure);
  if (detector) j["detector"] = {{"kind", detector->kind()}, {"id", detector_id}, {"threshold", detector->threshold()}};
  if (store) j["store"] = {{"id", store_id}, {"states", store->size()}, {"metric", store::to_string(store->metric())}};
  // OOD is judged against the rollout history the user observed, which is also the policy's
  // collection distribution here.
  if (kind == ConditionKind::ioda) j["ood_reference"] = "rollout_history";
  return j;
}

EffectiveState effective_state(const StateVector& s, const Condition& cond) {
  EffectiveState out;
  out.state = s;
  if (cond.detector) {
    require_dim(s, cond.detector->state_dim(), "effective_state");
    const double score = cond.detector->score(s);
    out.score = score;
    out.ood = score > cond.detector->threshold();
  }
  if (cond.kind != ConditionKind::ioda) return out;
  if (!cond.detector || !cond.store) throw MissingArtifact("effective_state: IODA needs a detector and a store");
  if (out.ood) {
    const store::Match m = cond.store->nearest(s);
    out.state = cond.store->point(m.index);
    out.imagined = true;
    out.match = m;
  }
  return out;
}

}  // namespace ioda::pc
