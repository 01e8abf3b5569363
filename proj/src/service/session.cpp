#include "ioda/service/session.hpp"

#include "ioda/env/pour_env.hpp"

#include <algorithm>

namespace ioda::service {

void Mailbox::put(ActionVector v) {
  std::lock_guard lock(mu_);
  value_ = std::move(v);
}

std::optional<ActionVector> Mailbox::latest() const {
  std::lock_guard lock(mu_);
  return value_;
}

void Mailbox::clear() {
  std::lock_guard lock(mu_);
  value_.reset();
}

TeleopSession::TeleopSession(std::string id, std::shared_ptr<const SessionConfig> cfg)
    : id_(std::move(id)), cfg_(std::move(cfg)), condition_(cfg_->initial_condition), next_seed_(cfg_->first_seed) {
  if (!cfg_->prototype || !cfg_->policy) throw pc::MissingArtifact("TeleopSession: environment and policy required");
  executor_ = std::make_unique<pc::PartitionedExecutor>(cfg_->prototype->clone(), make_setup(condition_));
}

pc::ExecutorSetup TeleopSession::make_setup(pc::ConditionKind kind) const {
  pc::ExecutorSetup s;
  s.policy = cfg_->policy;
  s.partition = cfg_->partition;
  switch (kind) {
    case pc::ConditionKind::rl: s.condition = pc::Condition::rl(cfg_->detector); break;
    case pc::ConditionKind::stop: s.condition = pc::Condition::stop(cfg_->stop_predicate, cfg_->detector); break;
    case pc::ConditionKind::ioda: s.condition = pc::Condition::ioda(cfg_->detector, cfg_->store); break;
  }
  if (cfg_->store) s.expectation = std::make_shared<pc::ExpectationModel>(cfg_->store, cfg_->policy, cfg_->partition);
  s.metadata = {{"session", id_}};
  return s;
}

std::string TeleopSession::hello() const {
  json j = envelope("hello");
  j["session"] = id_;
  j["env"] = cfg_->prototype->id();
  j["action_dim"] = cfg_->prototype->action_dim();
  j["state_dim"] = cfg_->prototype->state_dim();
  j["user_dims"] = cfg_->partition.user_dims();
  j["condition"] = pc::to_string(condition_);
  j["tick_hz"] = cfg_->tick_hz;
  return j.dump();
}

std::string TeleopSession::state_frame() const {
  const auto& ex = *executor_;
  json j = envelope("state");
  j["tick"] = ex.tick();
  j["state"] = to_json(ex.observe());
  j["condition"] = pc::to_string(condition_);
  const pc::EffectiveState eff = ex.peek_effective();
  j["ood"] = eff.ood;
  j["imagined_state"] = eff.imagined ? to_json(eff.state) : json(nullptr);
  json metrics{{"phi", nullptr}, {"alignment", nullptr}};
  if (const auto* pour = dynamic_cast<const env::PourEnv*>(&ex.env()))
    metrics["phi"] = env::pour_error(pour->state().bins, pour->config().target_per_bin);
  if (ex.report().alignment) metrics["alignment"] = *ex.report().alignment;
  j["metrics"] = metrics;
  j["done"] = ex.done();
  return j.dump();
}

std::string TeleopSession::done_message(const std::string& reason) const {
  json j = envelope("done");
  j["reason"] = reason;
  j["tick"] = executor_->tick();
  return j.dump();
}

std::vector<std::string> TeleopSession::handle(const std::string& text) {
  auto parsed = parse_client_message(text);
  if (auto* err = std::get_if<WireError>(&parsed)) return {error_message(*err)};
  auto& msg = std::get<ClientMessage>(parsed);

  if (auto* ua = std::get_if<UserActionMsg>(&msg)) {
    const auto dim = cfg_->partition.dim();
    if (ua->values.size() != dim)
      return {error_message({"bad_field", "values must have " + std::to_string(dim) + " entries"})};
    const ActionBounds b = cfg_->prototype->action_bounds();
    ActionVector u(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      u[k] = b.center[k] + b.half_range[k] * std::clamp(ua->values[i], -1.0, 1.0);
    }
    mailbox_.put(pc::mask_to_user(u, cfg_->partition));
    return {};
  }
  if (auto* sc = std::get_if<SetConditionMsg>(&msg)) {
    if (running_) return {error_message({"episode_in_progress", "set_condition is only allowed before reset"})};
    pc::ConditionKind kind;
    try {
      kind = pc::condition_kind_from_string(sc->name);
    } catch (const Error& e) {
      return {error_message({"bad_field", e.what()})};
    }
    try {
      executor_ = std::make_unique<pc::PartitionedExecutor>(cfg_->prototype->clone(), make_setup(kind));
    } catch (const Error& e) {
      return {error_message({"unavailable", e.what()})};
    }
    condition_ = kind;
    return {hello()};
  }
  const auto& reset = std::get<ResetMsg>(msg);
  const std::uint64_t seed = reset.seed.value_or(next_seed_);
  next_seed_ = seed + 1;
  mailbox_.clear();
  executor_->reset(seed);
  running_ = !executor_->done();
  return {state_frame()};
}

std::vector<std::string> TeleopSession::tick() {
  if (!running_) return {};
  const ActionVector u = mailbox_.latest().value_or(
      ActionVector::Zero(static_cast<Eigen::Index>(cfg_->partition.dim())));
  executor_->step(u);
  std::vector<std::string> out{state_frame()};
  if (executor_->done()) {
    running_ = false;
    out.push_back(done_message(executor_->report().goal_reached ? "goal" : "timeout"));
  }
  return out;
}

std::string TeleopSession::terminate() {
  running_ = false;
  return done_message("terminated");
}

}  // namespace ioda::service
