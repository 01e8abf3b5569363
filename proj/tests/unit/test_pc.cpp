#include "support/fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace ioda;
using namespace ioda::pc;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

std::vector<ActionVector> random_inputs(std::uint64_t seed, std::size_t n, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<ActionVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(v2(u(rng), u(rng)));
  return out;
}

/// User pushing x steadily to the left, well out of the workspace.
std::vector<ActionVector> push_left(std::size_t n) { return std::vector<ActionVector>(n, v2(-0.25, 0.3)); }

}  // namespace

TEST_SUITE("pc") {

TEST_CASE("combine worked examples") {
  const auto p = AxisPartition::user_owns(2, {0});
  CHECK(combine(v2(0.3, 0), v2(0, 0.5), p) == v2(0.3, 0.5));
  CHECK(combine(v2(0, 0), v2(0.7, 0.5), p) == mask_to_robot(v2(0.7, 0.5), p));
  const auto c = combine(v2(0.3, 9), v2(4, 0.5), p);
  CHECK(c == v2(0.3, 0.5));
  CHECK(combine(c, c, p) == c);
  CHECK(combine(mask_to_user(c, p), mask_to_robot(c, p), p) == c);
  CHECK_THROWS_AS(combine(Eigen::Vector3d(1, 2, 3), v2(0, 0), p), DimensionError);
}

TEST_CASE("partition validation and serialization") {
  CHECK_THROWS(AxisPartition::user_owns(2, {0, 1}).require_session());
  CHECK_THROWS(AxisPartition::user_owns(2, {}).require_session());
  CHECK_THROWS_AS(AxisPartition::user_owns(2, {2}), DimensionError);
  const auto p = AxisPartition::user_owns(3, {1});
  CHECK(p.user_dims() == std::vector<std::size_t>{1});
  CHECK(p.robot_dims() == std::vector<std::size_t>{0, 2});
  CHECK(AxisPartition::from_json(p.to_json()) == p);
}

TEST_CASE("condition names and predicates") {
  CHECK(condition_kind_from_string("IODA") == ConditionKind::ioda);
  CHECK(condition_kind_from_string("stop") == ConditionKind::stop);
  CHECK(to_string(ConditionKind::rl) == "RL");
  CHECK_THROWS(condition_kind_from_string("teleport"));
  env::StepInfo info;
  CHECK_FALSE(failure_holds(FailurePredicate::spilling, info));
  CHECK_FALSE(failure_holds(FailurePredicate::outside_workspace, info));
  info.spilling = true;
  info.in_workspace = false;
  CHECK(failure_holds(FailurePredicate::spilling, info));
  CHECK(failure_holds(FailurePredicate::outside_workspace, info));
}

TEST_CASE("IODA requires its artifacts") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  CHECK_THROWS_AS(Condition::ioda(nullptr, s.index).validate(4), MissingArtifact);
  CHECK_THROWS_AS(Condition::ioda(s.knn, nullptr).validate(4), MissingArtifact);
  CHECK_THROWS_AS(Condition::ioda(s.knn, s.index).validate(3), DimensionError);
  CHECK_NOTHROW(Condition::rl().validate(4));
  CHECK(Condition::ioda(s.knn, s.index).to_json()["ood_reference"] == "rollout_history");
}

TEST_CASE("effective state under each condition") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  const Eigen::Vector4d far(-6, 2, 5, 5);
  const auto rl = effective_state(far, Condition::rl(s.knn));
  CHECK(rl.state == far);
  CHECK_FALSE(rl.imagined);
  CHECK(rl.ood);
  const auto io = effective_state(far, Condition::ioda(s.knn, s.index));
  CHECK(io.imagined);
  CHECK(io.state == s.index->point(s.index->nearest_brute_force(far).index));
  // The imagined state is a member of D and maps to itself.
  const auto again = effective_state(io.state, Condition::ioda(s.knn, s.index));
  CHECK_FALSE(again.imagined);
  CHECK(again.state == io.state);
  // In-distribution states pass through.
  const StateVector member = s.index->point(7);
  const auto in = effective_state(member, Condition::ioda(s.knn, s.index));
  CHECK_FALSE(in.imagined);
  CHECK(in.state == member);
}

TEST_CASE("every applied action is the disjoint combination") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  const auto p = AxisPartition::user_owns(2, {0});
  for (auto k : {ConditionKind::rl, ConditionKind::stop, ConditionKind::ioda}) {
    auto setup = fixture::setup_for(k, s, p, FailurePredicate::outside_workspace);
    ReplayUser user(random_inputs(static_cast<std::uint64_t>(k) + 1, 300, 0.6), 2);
    const auto r = run_episode(nav, setup, user, 4);
    for (const auto& t : r.ticks) {
      CHECK(t.applied[0] == t.user[0]);
      CHECK(t.applied[1] == t.policy_action[1]);
      CHECK(t.user[1] == 0.0);
      CHECK(t.policy_action[0] == 0.0);
    }
  }
}

TEST_CASE("STOP zeroes robot dims exactly when the predicate held on the previous tick") {
  env::PourEnv pour;
  const auto s = fixture::make_study(pour, {true, false});
  const auto p = AxisPartition::user_owns(2, {1});
  auto setup = fixture::setup_for(ConditionKind::stop, s, p, FailurePredicate::spilling);
  std::vector<ActionVector> in(60, v2(0, 0.2));
  for (std::size_t i = 20; i < 60; ++i) in[i] = v2(0, i % 7 < 3 ? -0.2 : 0.1);
  ReplayUser user(in, 2);
  const auto r = run_episode(pour, setup, user, 1);
  env::StepInfo prev;
  std::size_t active = 0;
  for (const auto& t : r.ticks) {
    CHECK(t.stop_active == prev.spilling);
    if (t.stop_active) {
      CHECK(t.applied[0] == 0.0);
      CHECK(t.policy_action.norm() == 0.0);
      ++active;
    } else {
      CHECK(t.applied[0] == mask_to_robot(s.policy->act(t.policy_state, true), p)[0]);
    }
    prev = t.info;
  }
  CHECK(active > 0);
  CHECK(r.metrics["stop_ticks"] == active);
}

TEST_CASE("IODA episodes replay bit-identically from logged inputs") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  const auto p = AxisPartition::user_owns(2, {0});
  const auto setup = fixture::setup_for(ConditionKind::ioda, s, p, FailurePredicate::outside_workspace);
  ReplayUser user(push_left(40), 2);
  const auto logged = run_episode(nav, setup, user, 8);
  REQUIRE(logged.imagined_ticks() > 0);
  const auto again = replay_episode(nav, setup, logged);
  REQUIRE(again.ticks.size() == logged.ticks.size());
  for (std::size_t i = 0; i < logged.ticks.size(); ++i) CHECK(again.ticks[i] == logged.ticks[i]);
  CHECK(again.digest() == logged.digest());
  CHECK(EpisodeReport::from_json(logged.to_json()).digest() == logged.digest());
}

TEST_CASE("dynamics always step from the real state") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  const auto p = AxisPartition::user_owns(2, {0});
  const auto setup = fixture::setup_for(ConditionKind::ioda, s, p, FailurePredicate::outside_workspace);
  ReplayUser user(push_left(40), 2);
  const auto r = run_episode(nav, setup, user, 8);
  for (std::size_t i = 0; i + 1 < r.ticks.size(); ++i) CHECK(r.ticks[i + 1].state == r.ticks[i].next_state);
  for (const auto& t : r.ticks) {
    const auto tr = env::nav_step(env::NavState::from_vector(t.state), t.applied, nav.config());
    CHECK(tr.next.flatten() == t.next_state);
  }
}

TEST_CASE("RL with an idle user reproduces the autonomous rollout") {
  env::PourEnv pour;
  const auto s = fixture::make_study(pour, {true, false});
  const auto p = AxisPartition::user_owns(2, {1});
  const auto setup = fixture::setup_for(ConditionKind::rl, s, p, FailurePredicate::spilling);
  IdleUser idle(2);
  const auto r = run_episode(pour, setup, idle, 21);
  auto env = pour.clone();
  StateVector st = env->reset(21);
  std::size_t i = 0;
  while (!env->done()) {
    const auto res = env->step(s.policy->act(st, true));
    REQUIRE(i < r.ticks.size());
    CHECK(r.ticks[i].next_state == res.next_state);
    st = res.next_state;
    ++i;
  }
  CHECK(i == r.ticks.size());
}

TEST_CASE("autonomous in-distribution rollout has zero expectation alignment") {
  env::PourEnv pour;
  const auto s = fixture::make_study(pour, {true, false});
  const auto p = AxisPartition::user_owns(2, {1});
  const auto setup = fixture::setup_for(ConditionKind::rl, s, p, FailurePredicate::spilling);
  IdleUser idle(2);
  const auto r = run_episode(pour, setup, idle, (*s.history)[0].seed);
  REQUIRE(r.alignment.has_value());
  CHECK(*r.alignment <= 1e-9);
  CHECK(expectation_alignment(r, *setup.expectation, pour) <= 1e-9);
}

TEST_CASE("single-tick alignment is that tick's distance") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  const auto p = AxisPartition::user_owns(2, {0});
  const auto setup = fixture::setup_for(ConditionKind::rl, s, p, FailurePredicate::outside_workspace);
  ReplayUser user(push_left(30), 2);
  auto r = run_episode(nav, setup, user, 2);
  r.ticks.resize(1);
  const auto& t = r.ticks[0];
  const double d = setup.expectation->distance(*t.expected_next, t.next_state);
  CHECK(expectation_alignment(r, *setup.expectation, nav) == doctest::Approx(d).epsilon(1e-15));
  r.ticks.clear();
  CHECK_THROWS(expectation_alignment(r, *setup.expectation, nav));
}

TEST_CASE("imagined ticks satisfy the counterfactual inequality") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  const auto p = AxisPartition::user_owns(2, {0});
  const auto setup = fixture::setup_for(ConditionKind::ioda, s, p, FailurePredicate::outside_workspace);
  ReplayUser user(push_left(40), 2);
  const auto r = run_episode(nav, setup, user, 5);
  std::size_t checked = 0;
  for (const auto& t : r.ticks) {
    if (!t.imagined) continue;
    const auto cf = counterfactual(t, setup, nav);
    const double with_policy = setup.expectation->distance(*t.expected_next, cf.with_policy_state);
    const double with_real = setup.expectation->distance(*t.expected_next, cf.with_real_state);
    CHECK(with_policy <= with_real);
    CHECK(cf.with_policy_state == t.next_state);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("scripted users emit only on their own axis") {
  NavXController nav_user(NavUserConfig{{{-3.0, 6.0}}, 0.3, 0.25});
  nav_user.reset(1);
  auto a = nav_user.act(Eigen::Vector4d(1, 1, 5, 9), 0);
  CHECK(a[0] == -0.25);
  CHECK(a[1] == 0.0);
  a = nav_user.act(Eigen::Vector4d(-3, 6.1, 5, 9), 1);
  CHECK(nav_user.subgoals_reached() == 1);
  CHECK(a[0] > 0.0);

  env::PourConfig pc;
  PourScript pour_user(PourUserConfig{}, pc);
  pour_user.reset(3);
  for (int t = 0; t < 30; ++t) {
    const auto u = pour_user.act(Eigen::Vector3d(0.03 * t, 0.5, 300), t);
    CHECK(u[0] == 0.0);
    CHECK(std::abs(u[1]) <= pc.max_wrist_speed);
  }
}

TEST_CASE("pour user levels the wrist after a stall") {
  env::PourConfig pc;
  PourUserConfig cfg;
  cfg.jitter = 0.0;
  cfg.latency_jitter = 0;
  PourScript user(cfg, pc);
  user.reset(1);
  // Stalled in the pour region, tilted past the spill angle.
  double theta = pc.theta_spill + 0.5;
  for (int t = 0; t < cfg.reaction_latency + 20; ++t) {
    const auto u = user.act(Eigen::Vector3d(0.4, theta, 200), t);
    theta = std::clamp(theta + u[1], 0.0, std::numbers::pi);
  }
  CHECK(theta < pc.theta_spill);
}

TEST_CASE("rejects mismatched setups and steps after the end") {
  env::NavEnv nav;
  const auto s = fixture::make_study(nav);
  auto setup = fixture::setup_for(ConditionKind::rl, s, AxisPartition::user_owns(2, {0}), FailurePredicate::spilling);
  setup.partition = AxisPartition::user_owns(3, {0});
  CHECK_THROWS_AS(PartitionedExecutor(nav.clone(), setup), DimensionError);
  setup.partition = AxisPartition::user_owns(2, {0});
  PartitionedExecutor ex(nav.clone(), setup);
  CHECK_THROWS(ex.step(v2(0, 0)));
  ex.reset(1);
  while (!ex.done()) ex.step(v2(0, 0));
  CHECK_THROWS_AS(ex.step(v2(0, 0)), env::EpisodeOver);
}

}
