#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/ood/detector.hpp"
#include "ioda/store/state_index.hpp"

#include <memory>
#include <optional>
#include <string>

namespace ioda::pc {

enum class ConditionKind { rl, stop, ioda };
std::string to_string(ConditionKind k);
ConditionKind condition_kind_from_string(const std::string& s);

enum class FailurePredicate { spilling, outside_workspace };
std::string to_string(FailurePredicate f);
FailurePredicate failure_predicate_from_string(const std::string& s);
bool failure_holds(FailurePredicate f, const env::StepInfo& last_step);

class MissingArtifact : public Error {
 public:
  using Error::Error;
};

/// Execution condition. The detector, when present, is also used to report OOD flags under RL and
/// STOP; only IODA acts on it.
struct Condition {
  ConditionKind kind = ConditionKind::rl;
  FailurePredicate failure = FailurePredicate::spilling;
  std::shared_ptr<const ood::OodDetector> detector;
  std::shared_ptr<const store::StateIndex> store;
  std::string detector_id;
  std::string store_id;

  static Condition rl(std::shared_ptr<const ood::OodDetector> detector = nullptr);
  static Condition stop(FailurePredicate failure, std::shared_ptr<const ood::OodDetector> detector = nullptr);
  static Condition ioda(std::shared_ptr<const ood::OodDetector> detector, std::shared_ptr<const store::StateIndex> store);

  /// Throws MissingArtifact / DimensionError when references are absent or inconsistent.
  void validate(std::size_t state_dim) const;
  json to_json() const;
};

struct EffectiveState {
  StateVector state;
  bool imagined = false;
  bool ood = false;
  std::optional<double> score;
  std::optional<store::Match> match;
};

/// RL/STOP: the real state. IODA: the nearest stored state when the real state is OOD.
EffectiveState effective_state(const StateVector& s, const Condition& cond);

}  // namespace ioda::pc
