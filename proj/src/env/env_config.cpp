#include "ioda/env/env_config.hpp"

namespace ioda::env {

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_header(const json& j, const char* env) {
  if (require_field(j, "schema") != "ioda.env-config") throw ArchiveError("not an env config document");
  if (require_field(j, "version").get<int>() != kEnvConfigVersion)
    throw ArchiveError("unsupported env config version");
  if (require_field(j, "env") != env) throw ArchiveError(std::string("env config is not for '") + env + "'");
}

}  // namespace

std::string to_string(NavRewardVariant v) {
  return v == NavRewardVariant::workspace_penalty ? "workspace_penalty" : "return_home";
}

NavRewardVariant nav_variant_from_string(const std::string& s) {
  if (s == "workspace_penalty") return NavRewardVariant::workspace_penalty;
  if (s == "return_home") return NavRewardVariant::return_home;
  throw Error("unknown navigation reward variant '" + s + "'");
}

json env_config_to_json(const NavConfig& c) {
  return json{{"schema", "ioda.env-config"},
              {"version", kEnvConfigVersion},
              {"env", "nav"},
              {"workspace", {c.workspace.x_min, c.workspace.x_max, c.workspace.y_min, c.workspace.y_max}},
              {"max_speed", c.max_speed},
              {"variant", to_string(c.variant)},
              {"goal_radius", c.goal_radius},
              {"step_penalty", c.step_penalty},
              {"leave_penalty", c.leave_penalty},
              {"y_motion_penalty", c.y_motion_penalty},
              {"goal_reward", c.goal_reward},
              {"episode_cap", c.episode_cap},
              {"progress_shaping", c.progress_shaping},
              {"terminate_outside", c.terminate_outside},
              {"reset_outside_fraction", c.reset_outside_fraction},
              {"reset_outside_band", c.reset_outside_band},
              {"reset_margin", c.reset_margin}};
}

json env_config_to_json(const PourConfig& c) {
  return json{{"schema", "ioda.env-config"},
              {"version", kEnvConfigVersion},
              {"env", "pour"},
              {"initial_mass", c.initial_mass},
              {"theta_spill", c.theta_spill},
              {"outflow_coeff", c.outflow_coeff},
              {"bin_centers", c.bin_centers},
              {"bin_half_width", c.bin_half_width},
              {"max_path_speed", c.max_path_speed},
              {"max_wrist_speed", c.max_wrist_speed},
              {"speed_trigger", c.speed_trigger},
              {"spill_speed", c.spill_speed},
              {"spill_margin", c.spill_margin},
              {"tick_penalty", c.tick_penalty},
              {"spill_penalty", c.spill_penalty},
              {"overspeed_penalty", c.overspeed_penalty},
              {"goal_reward", c.goal_reward},
              {"target_per_bin", c.target_per_bin},
              {"episode_cap", c.episode_cap},
              {"start_jitter", c.start_jitter},
              {"tilted_reset_fraction", c.tilted_reset_fraction},
              {"tilted_reset_max_theta", c.tilted_reset_max_theta},
              {"tilted_reset_max_path", c.tilted_reset_max_path}};
}

NavConfig nav_config_from_json(const json& j) {
  check_header(j, "nav");
  NavConfig c;
  if (j.contains("workspace")) {
    const auto w = j.at("workspace").get<std::vector<double>>();
    if (w.size() != 4) throw ArchiveError("workspace must be [x_min, x_max, y_min, y_max]");
    c.workspace = Rect{w[0], w[1], w[2], w[3]};
  }
  read_opt(j, "max_speed", c.max_speed);
  if (j.contains("variant")) c.variant = nav_variant_from_string(j.at("variant").get<std::string>());
  read_opt(j, "goal_radius", c.goal_radius);
  read_opt(j, "step_penalty", c.step_penalty);
  read_opt(j, "leave_penalty", c.leave_penalty);
  read_opt(j, "y_motion_penalty", c.y_motion_penalty);
  read_opt(j, "goal_reward", c.goal_reward);
  read_opt(j, "episode_cap", c.episode_cap);
  read_opt(j, "progress_shaping", c.progress_shaping);
  read_opt(j, "terminate_outside", c.terminate_outside);
  read_opt(j, "reset_outside_fraction", c.reset_outside_fraction);
  read_opt(j, "reset_outside_band", c.reset_outside_band);
  read_opt(j, "reset_margin", c.reset_margin);
  c.validate();
  return c;
}

PourConfig pour_config_from_json(const json& j) {
  check_header(j, "pour");
  PourConfig c;
  read_opt(j, "initial_mass", c.initial_mass);
  read_opt(j, "theta_spill", c.theta_spill);
  read_opt(j, "outflow_coeff", c.outflow_coeff);
  read_opt(j, "bin_centers", c.bin_centers);
  read_opt(j, "bin_half_width", c.bin_half_width);
  read_opt(j, "max_path_speed", c.max_path_speed);
  read_opt(j, "max_wrist_speed", c.max_wrist_speed);
  read_opt(j, "speed_trigger", c.speed_trigger);
  read_opt(j, "spill_speed", c.spill_speed);
  read_opt(j, "spill_margin", c.spill_margin);
  read_opt(j, "tick_penalty", c.tick_penalty);
  read_opt(j, "spill_penalty", c.spill_penalty);
  read_opt(j, "overspeed_penalty", c.overspeed_penalty);
  read_opt(j, "goal_reward", c.goal_reward);
  read_opt(j, "target_per_bin", c.target_per_bin);
  read_opt(j, "episode_cap", c.episode_cap);
  read_opt(j, "start_jitter", c.start_jitter);
  read_opt(j, "tilted_reset_fraction", c.tilted_reset_fraction);
  read_opt(j, "tilted_reset_max_theta", c.tilted_reset_max_theta);
  read_opt(j, "tilted_reset_max_path", c.tilted_reset_max_path);
  c.validate();
  return c;
}

std::unique_ptr<Environment> make_environment(const json& doc) {
  const std::string id = require_field(doc, "env").get<std::string>();
  if (id == "nav") return std::make_unique<NavEnv>(nav_config_from_json(doc));
  if (id == "pour") return std::make_unique<PourEnv>(pour_config_from_json(doc));
  throw ArchiveError("unknown environment '" + id + "'");
}

std::unique_ptr<Environment> load_environment(const std::filesystem::path& path) {
  return make_environment(read_json_file(path));
}

}  // namespace ioda::env
