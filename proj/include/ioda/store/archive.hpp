#pragma once

#include "ioda/store/rollout.hpp"

#include <filesystem>
#include <string>

namespace ioda::store {

inline constexpr int kArchiveVersion = 1;

class ArchiveVersionError : public ArchiveError {
 public:
  using ArchiveError::ArchiveError;
};

/// JSON Lines archive. Line 1 is the header
///   {"format":"ioda.rollouts","version":1,"state_dim":n,"action_dim":m,"episodes":N}
/// followed by one episode per line
///   {"episode":id,"seed":s,"terminal":bool,"states":[[..],..],"actions":[[..],..],"rewards":[..]}.
std::string serialize_history(const RolloutHistory& history);
RolloutHistory parse_history(const std::string& text);

void save_history(const RolloutHistory& history, const std::filesystem::path& path);
RolloutHistory load_history(const std::filesystem::path& path);

}  // namespace ioda::store
