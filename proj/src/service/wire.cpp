#include "ioda/service/wire.hpp"

namespace ioda::service {

json envelope(const std::string& type) { return json{{"version", kWireVersion}, {"type", type}}; }

std::string error_message(const WireError& e) {
  json j = envelope("error");
  j["code"] = e.code;
  j["message"] = e.message;
  return j.dump();
}

std::variant<ClientMessage, WireError> parse_client_message(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return WireError{"malformed", "message is not a JSON object"};
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kWireVersion)
    return WireError{"version_mismatch", "expected version " + std::to_string(kWireVersion)};
  if (!j.contains("type") || !j["type"].is_string()) return WireError{"malformed", "missing type"};
  const auto type = j["type"].get<std::string>();
  if (type == "user_action") {
    if (!j.contains("values") || !j["values"].is_array()) return WireError{"bad_field", "user_action needs values[]"};
    UserActionMsg m;
    for (const auto& v : j["values"]) {
      if (!v.is_number()) return WireError{"bad_field", "values must be numbers"};
      m.values.push_back(v.get<double>());
    }
    return ClientMessage{m};
  }
  if (type == "set_condition") {
    if (!j.contains("name") || !j["name"].is_string()) return WireError{"bad_field", "set_condition needs name"};
    return ClientMessage{SetConditionMsg{j["name"].get<std::string>()}};
  }
  if (type == "reset") {
    ResetMsg m;
    if (j.contains("seed") && !j["seed"].is_null()) {
      if (!j["seed"].is_number_unsigned()) return WireError{"bad_field", "seed must be a non-negative integer"};
      m.seed = j["seed"].get<std::uint64_t>();
    }
    return ClientMessage{m};
  }
  return WireError{"unknown_type", "unknown message type '" + type + "'"};
}

}  // namespace ioda::service
