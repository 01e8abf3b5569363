#pragma once

#include "ioda/core/json_io.hpp"
#include "ioda/core/types.hpp"

#include <optional>
#include <string>
#include <variant>

namespace ioda::service {

/// Wire schema version carried by every message as "version".
inline constexpr int kWireVersion = 1;

/// Client -> server.
///   {"version":1,"type":"user_action","values":[v0,..]}  values in [-1,1] of each axis' range;
///                                                          robot-owned entries are ignored
///   {"version":1,"type":"set_condition","name":"RL"|"STOP"|"IODA"}
///   {"version":1,"type":"reset","seed":n}                  seed optional
struct UserActionMsg {
  std::vector<double> values;
};
struct SetConditionMsg {
  std::string name;
};
struct ResetMsg {
  std::optional<std::uint64_t> seed;
};
using ClientMessage = std::variant<UserActionMsg, SetConditionMsg, ResetMsg>;

struct WireError {
  std::string code;  // malformed | version_mismatch | unknown_type | bad_field
  std::string message;
};

/// Either the decoded message or the reason it was rejected.
std::variant<ClientMessage, WireError> parse_client_message(const std::string& text);

/// Server -> client.
///   {"version":1,"type":"hello","session":id,"env":..,"action_dim":n,"user_dims":[..],"condition":..,"tick_hz":f}
///   {"version":1,"type":"state","tick":t,"state":[..],"ood":b,"imagined_state":[..]|null,
///    "metrics":{"phi":x|null,"alignment":y|null},"done":b,"condition":..}
///   {"version":1,"type":"error","code":..,"message":..}
///   {"version":1,"type":"done","reason":"goal"|"timeout"|"terminated","tick":t}
std::string error_message(const WireError& e);
json envelope(const std::string& type);

}  // namespace ioda::service
