#pragma once

#include "ioda/env/environment.hpp"
#include "ioda/pc/condition.hpp"
#include "ioda/pc/partition.hpp"

#include <optional>

namespace ioda::pc {

struct TickRecord {
  int tick = 0;
  StateVector state;
  Eigen::VectorXd snapshot;  // full internal environment state before the step
  StateVector policy_state;
  bool ood = false;
  bool imagined = false;
  std::optional<double> ood_score;
  ActionVector user;
  ActionVector policy_action;
  ActionVector applied;
  bool stop_active = false;
  double reward = 0.0;
  StateVector next_state;
  env::StepInfo info;
  std::optional<StateVector> expected_next;

  json to_json() const;
  static TickRecord from_json(const json& j);
  friend bool operator==(const TickRecord&, const TickRecord&);
};

struct EpisodeReport {
  std::string env_id;
  ConditionKind condition = ConditionKind::rl;
  std::uint64_t seed = 0;
  AxisPartition partition;
  Eigen::VectorXd initial_snapshot;
  Eigen::VectorXd final_snapshot;
  std::vector<TickRecord> ticks;
  bool goal_reached = false;
  bool timeout = false;
  double total_reward = 0.0;
  /// Mean d(W(s_t), s_{t+1}); present when an expectation model was attached.
  std::optional<double> alignment;
  /// Environment-specific metrics such as the pour error.
  json metrics = json::object();
  json metadata = json::object();

  std::size_t length() const { return ticks.size(); }
  std::vector<ActionVector> user_inputs() const;
  std::size_t imagined_ticks() const;

  json to_json() const;
  static EpisodeReport from_json(const json& j);
  /// Digest of the canonical JSON form.
  std::string digest() const;
};

/// Trajectory rows for plotting: tick, state, applied action, flags.
std::string trajectory_csv(const EpisodeReport& report);

}  // namespace ioda::pc
