#include "ioda/store/archive.hpp"

#include "ioda/core/json_io.hpp"

#include <sstream>

namespace ioda::store {

namespace {

json rows_to_json(const std::vector<Eigen::VectorXd>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  return out;
}

std::vector<Eigen::VectorXd> rows_from_json(const json& j, std::size_t dim) {
  if (!j.is_array()) throw ArchiveError("corrupt archive: expected array of rows");
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(j.size());
  for (const auto& r : j) {
    rows.push_back(vector_from_json(r));
    if (static_cast<std::size_t>(rows.back().size()) != dim) throw ArchiveError("corrupt archive: row dimension");
  }
  return rows;
}

}  // namespace

std::string serialize_history(const RolloutHistory& history) {
  std::string out = json{{"format", "ioda.rollouts"},
                         {"version", kArchiveVersion},
                         {"state_dim", history.state_dim()},
                         {"action_dim", history.action_dim()},
                         {"episodes", history.size()}}
                        .dump();
  out.push_back('\n');
  for (const auto& e : history.episodes()) {
    out += json{{"episode", e.episode_id},
                {"seed", e.seed},
                {"terminal", e.terminal},
                {"states", rows_to_json(e.states)},
                {"actions", rows_to_json(e.actions)},
                {"rewards", e.rewards}}
               .dump();
    out.push_back('\n');
  }
  return out;
}

RolloutHistory parse_history(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ArchiveError("corrupt archive: missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error&) {
    throw ArchiveError("corrupt archive: unreadable header");
  }
  if (!header.is_object() || header.value("format", "") != "ioda.rollouts")
    throw ArchiveError("corrupt archive: not a rollout archive");
  if (require_field(header, "version").get<int>() != kArchiveVersion)
    throw ArchiveVersionError("rollout archive version " + header.at("version").dump() + " is not supported");
  const auto state_dim = require_field(header, "state_dim").get<std::size_t>();
  const auto action_dim = require_field(header, "action_dim").get<std::size_t>();
  const auto expected = require_field(header, "episodes").get<std::size_t>();

  RolloutHistory history(state_dim, action_dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ArchiveError("corrupt archive: unreadable episode at line " + std::to_string(line_no));
    }
    Rollout r;
    try {
      r.episode_id = require_field(j, "episode").get<std::uint64_t>();
      r.seed = require_field(j, "seed").get<std::uint64_t>();
      r.terminal = require_field(j, "terminal").get<bool>();
      r.states = rows_from_json(require_field(j, "states"), state_dim);
      r.actions = rows_from_json(require_field(j, "actions"), action_dim);
      r.rewards = require_field(j, "rewards").get<std::vector<double>>();
      history.add(std::move(r));
    } catch (const json::exception& e) {
      throw ArchiveError("corrupt archive: bad episode at line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DimensionError& e) {
      throw ArchiveError("corrupt archive: " + std::string(e.what()));
    }
  }
  if (history.size() != expected)
    throw ArchiveError("corrupt archive: header announces " + std::to_string(expected) + " episodes, found " +
                       std::to_string(history.size()));
  return history;
}

void save_history(const RolloutHistory& history, const std::filesystem::path& path) {
  write_text_file(path, serialize_history(history));
}

RolloutHistory load_history(const std::filesystem::path& path) { return parse_history(read_text_file(path)); }

}  // namespace ioda::store
