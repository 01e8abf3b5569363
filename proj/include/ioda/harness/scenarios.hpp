#pragma once

#include "ioda/pc/executor.hpp"
#include "ioda/pc/simulated_user.hpp"

namespace ioda::harness {

/// Navigation layout: one subgoal outside the workspace per trial, on the left or right side by
/// seed parity, followed by the primary goal inside the workspace.
struct NavLayout {
  pc::Point2 left_start{1.5, 0.5};
  pc::Point2 left_subgoal{-3.0, 6.0};
  pc::Point2 right_start{8.5, 0.5};
  pc::Point2 right_subgoal{13.0, 6.0};
  pc::Point2 goal{5.0, 9.5};
  double jitter = 0.25;  // uniform +- on start and goal coordinates
  double subgoal_radius = 0.3;

  json to_json() const;
  static NavLayout from_json(const json& j);
};

struct NavTrial {
  std::uint64_t seed = 0;
  bool left = true;
  env::NavState start;
  pc::Point2 subgoal;
};

NavTrial nav_trial(const NavLayout& layout, std::uint64_t seed);
pc::EpisodeStart nav_start(const NavTrial& trial);
pc::NavXController nav_user(const NavLayout& layout, const NavTrial& trial, const env::NavConfig& env_cfg);

struct NavOutcome {
  bool subgoal_reached = false;
  bool goal_reached = false;
  bool both() const { return subgoal_reached && goal_reached; }
  std::size_t outside_ticks = 0;
  std::size_t inside_ticks = 0;
  double mean_abs_dy_outside = 0.0;
  double mean_abs_dy_inside = 0.0;

  json to_json() const;
};

NavOutcome evaluate_nav(const pc::EpisodeReport& report, const NavTrial& trial, const NavLayout& layout,
                        const env::NavConfig& env_cfg);

}  // namespace ioda::harness
