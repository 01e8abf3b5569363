#pragma once

#include "ioda/pc/executor.hpp"
#include "ioda/service/wire.hpp"

#include <mutex>

namespace ioda::service {

struct SessionConfig {
  std::shared_ptr<const env::Environment> prototype;
  std::shared_ptr<const learn::GaussianPolicy> policy;
  std::shared_ptr<const store::StateIndex> store;       // needed for IODA and alignment
  std::shared_ptr<const ood::OodDetector> detector;     // needed for IODA and OOD flags
  pc::AxisPartition partition;
  pc::ConditionKind initial_condition = pc::ConditionKind::ioda;
  pc::FailurePredicate stop_predicate = pc::FailurePredicate::spilling;
  std::uint64_t first_seed = 0;
  double tick_hz = 20.0;
};

/// Latest-value-wins slot for the user command, read once per tick.
class Mailbox {
 public:
  void put(ActionVector v);
  std::optional<ActionVector> latest() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::optional<ActionVector> value_;
};

/// Transport-independent session state: one executor, one mailbox, wire encoding.
class TeleopSession {
 public:
  TeleopSession(std::string id, std::shared_ptr<const SessionConfig> cfg);

  const std::string& id() const { return id_; }
  std::string hello() const;
  /// Processes one client message and returns the replies (errors, or the tick-0 frame on reset).
  std::vector<std::string> handle(const std::string& text);
  /// One tick of the running episode; nothing when idle.
  std::vector<std::string> tick();
  /// Final message for a session closed by the server.
  std::string terminate();

  bool running() const { return running_; }
  pc::ConditionKind condition() const { return condition_; }
  const pc::EpisodeReport& report() const { return executor_->report(); }
  const pc::ExecutorSetup& setup() const { return executor_->setup(); }
  Mailbox& mailbox() { return mailbox_; }

 private:
  pc::ExecutorSetup make_setup(pc::ConditionKind kind) const;
  std::string state_frame() const;
  std::string done_message(const std::string& reason) const;

  std::string id_;
  std::shared_ptr<const SessionConfig> cfg_;
  pc::ConditionKind condition_;
  std::unique_ptr<pc::PartitionedExecutor> executor_;
  Mailbox mailbox_;
  std::uint64_t next_seed_;
  bool running_ = false;
};

}  // namespace ioda::service
