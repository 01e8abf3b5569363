#include "ioda/env/nav_env.hpp"
#include "ioda/learn/sac.hpp"
#include "ioda/store/archive.hpp"
#include "ioda/store/collect.hpp"
#include "ioda/store/state_index.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace ioda;
using namespace ioda::store;

namespace {

RolloutHistory small_history() {
  RolloutHistory h(2, 1);
  for (std::uint64_t e = 0; e < 3; ++e) {
    Rollout r;
    r.episode_id = e;
    r.seed = 100 + e;
    for (int t = 0; t < 4; ++t) {
      r.states.push_back(Eigen::Vector2d(0.1 * t + e, -0.3 * t + 1.0 / 3.0));
      r.actions.push_back(Eigen::VectorXd::Constant(1, 0.25 * t));
      r.rewards.push_back(-0.1 * t);
    }
    r.terminal = e == 1;
    h.add(r);
  }
  return h;
}

Eigen::MatrixXd random_points(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-5, 5);
  Eigen::MatrixXd p(dim, n);
  for (auto& v : p.reshaped()) v = u(rng);
  return p;
}

std::vector<StateRef> flat_refs(std::size_t n) {
  std::vector<StateRef> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = {0, i};
  return r;
}

}  // namespace

TEST_SUITE("store") {

TEST_CASE("history archive round trips exactly") {
  const auto h = small_history();
  const auto back = parse_history(serialize_history(h));
  CHECK(back == h);
  CHECK(back.total_states() == 12);
  const auto path = std::filesystem::temp_directory_path() / "ioda_store_rt.jsonl";
  save_history(h, path);
  CHECK(load_history(path) == h);
}

TEST_CASE("archive rejects truncation and unknown versions") {
  const std::string text = serialize_history(small_history());
  CHECK_THROWS_AS(parse_history(text.substr(0, text.size() / 2)), ArchiveError);
  std::string bumped = text;
  bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":7");
  CHECK_THROWS_AS(parse_history(bumped), ArchiveVersionError);
  CHECK_THROWS_AS(parse_history(""), ArchiveError);
  CHECK_THROWS_AS(load_history("/nonexistent/none.jsonl"), ArchiveError);
}

TEST_CASE("history rejects inconsistent state dimensions") {
  RolloutHistory h(2, 1);
  Rollout r;
  r.states.push_back(Eigen::Vector3d(1, 2, 3));
  r.actions.push_back(Eigen::VectorXd::Zero(1));
  r.rewards.push_back(0);
  CHECK_THROWS(h.add(r));
}

TEST_CASE("state matrix and refs follow insertion order") {
  const auto h = small_history();
  const auto m = h.state_matrix();
  const auto refs = h.state_refs();
  CHECK(m.cols() == 12);
  CHECK(refs[5] == StateRef{1, 1});
  CHECK(m.col(5) == h[1].states[1]);
}

TEST_CASE("accelerated nearest equals brute force on 10^4 states") {
  std::mt19937_64 rng(99);
  const Eigen::MatrixXd pts = random_points(rng, 4, 10000);
  const Eigen::VectorXd w = Eigen::Vector4d(1.0, 0.5, 2.0, 1.0);
  StateIndex idx(pts, flat_refs(10000), w, true);
  REQUIRE(idx.accelerated());
  const Eigen::MatrixXd queries = random_points(rng, 4, 100);
  int mismatches = 0;
  for (Eigen::Index q = 0; q < 100; ++q) {
    const Eigen::VectorXd query = queries.col(q);
    const auto m = idx.nearest(query);
    mismatches += m.index != oracle::brute_force_nearest(pts, w, query);
    CHECK(m.distance == doctest::Approx(idx.distance(query, idx.point(m.index))));
  }
  CHECK(mismatches == 0);
}

TEST_CASE("ties resolve to the lowest insertion index") {
  Eigen::MatrixXd pts(2, 6);
  pts << 1, -1, 1, 0, 1, -1,
         0, 0, 0, 1, 0, 0;
  StateIndex fast(pts, flat_refs(6), Eigen::Vector2d::Ones(), true);
  StateIndex slow(pts, flat_refs(6), Eigen::Vector2d::Ones(), false);
  // equidistant from 0, 1, 3 (and duplicates 2, 4, 5)
  const Eigen::Vector2d q(0, 0);
  CHECK(fast.nearest(q).index == 0);
  CHECK(slow.nearest(q).index == 0);
  CHECK(fast.nearest_excluding(q, 0).index == 1);
  CHECK(fast.nearest(Eigen::Vector2d(1, 0)).index == 0);
  CHECK(fast.nearest_excluding(Eigen::Vector2d(1, 0), 0).index == 2);
}

TEST_CASE("ties with many duplicates match brute force") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grid(-3, 3);
  Eigen::MatrixXd pts(3, 2000);
  for (auto& v : pts.reshaped()) v = grid(rng);
  StateIndex idx(pts, flat_refs(2000), Eigen::Vector3d::Ones(), true);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d q(grid(rng) + 0.5, grid(rng), grid(rng) - 0.5);
    CHECK(idx.nearest(q).index == oracle::brute_force_nearest(pts, Eigen::Vector3d::Ones(), q));
    const std::size_t ex = static_cast<std::size_t>(i * 7);
    CHECK(idx.nearest_excluding(q, ex).index == idx.nearest_brute_force(q, ex).index);
  }
}

TEST_CASE("projection is idempotent on stored states") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd pts = random_points(rng, 3, 3000);
  StateIndex idx(pts, flat_refs(3000), Eigen::Vector3d::Ones(), true);
  for (std::size_t i = 0; i < 3000; i += 37) {
    const auto m = idx.nearest(idx.point(i));
    CHECK(m.index == i);
    CHECK(m.distance == 0.0);
    CHECK(idx.nearest(idx.point(idx.nearest(pts.col(static_cast<Eigen::Index>(i)) * 1.01).index)).distance == 0.0);
  }
}

TEST_CASE("query dimension is checked") {
  StateIndex idx(Eigen::MatrixXd::Zero(2, 3), flat_refs(3), Eigen::Vector2d::Ones());
  CHECK_THROWS_AS(idx.nearest(Eigen::Vector3d(1, 2, 3)), DimensionError);
}

TEST_CASE("collection is deterministic and refs resolve") {
  env::NavEnv env;
  learn::SacConfig cfg;
  cfg.hidden = {8};
  learn::SacLearner l(env, cfg);
  const auto a = collect(l.policy(), env, 5, 3);
  const auto b = collect(l.policy(), env, 5, 3);
  CHECK(a == b);
  CHECK(a.size() == 5);
  CHECK(a[2].seed == episode_seed(3, 2));
  const auto idx = StateIndex::from_history(a);
  CHECK(idx.size() == a.total_states());
  const auto ref = idx.ref(idx.size() - 1);
  CHECK(a[ref.episode].states[ref.step] == idx.point(idx.size() - 1));
}

}
