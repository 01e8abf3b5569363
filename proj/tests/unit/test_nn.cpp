#include "ioda/nn/adam.hpp"
#include "ioda/nn/dense_net.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <filesystem>

using namespace ioda;
using nn::Activation;

TEST_SUITE("nn") {

TEST_CASE("zero weights map any input to zero") {
  std::mt19937_64 rng(1);
  nn::DenseNet net({3, 4, 2}, {Activation::tanh, Activation::identity}, false, rng);
  net.set_parameters(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.parameter_count())));
  CHECK(net.forward(Eigen::VectorXd(Eigen::Vector3d(1.5, -2.0, 7.0))).isZero(0.0));
}

TEST_CASE("identity layer passes the input through") {
  nn::DenseLayer layer{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Activation::identity};
  nn::DenseNet net({layer});
  const Eigen::Vector2d y = net.forward(Eigen::VectorXd(Eigen::Vector2d(0.3, -0.7)));
  CHECK(y[0] == 0.3);
  CHECK(y[1] == -0.7);
}

TEST_CASE("forward matches a straight-line re-evaluation") {
  std::mt19937_64 rng(2);
  nn::DenseNet net({4, 8, 2}, {Activation::relu, Activation::tanh}, false, rng);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(4);
    for (auto& v : x) v = n(rng);
    CHECK((net.forward(x) - oracle::naive_forward(net, x)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  std::mt19937_64 rng(3);
  nn::DenseNet net({3, 2}, {Activation::identity}, false, rng);
  CHECK_THROWS_AS(net.forward(Eigen::VectorXd(Eigen::Vector2d(1, 2))), DimensionError);
}

TEST_CASE("zero upstream gives zero gradients") {
  std::mt19937_64 rng(4);
  nn::DenseNet net({3, 5, 2}, {Activation::tanh, Activation::identity}, false, rng);
  const auto g = net.backward(Eigen::MatrixXd::Random(3, 4), Eigen::MatrixXd::Zero(2, 4));
  CHECK(g.params.isZero(0.0));
  CHECK(g.input.isZero(0.0));
}

TEST_CASE("single linear layer weight gradient is the outer product") {
  std::mt19937_64 rng(5);
  nn::DenseNet net({3, 2}, {Activation::identity}, false, rng);
  const Eigen::Vector3d x(0.5, -1.0, 2.0);
  const Eigen::Vector2d up(1.5, -0.25);
  const auto g = net.backward(Eigen::MatrixXd(x), Eigen::MatrixXd(up));
  const Eigen::MatrixXd outer = up * x.transpose();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(g.params[r * 3 + c] == doctest::Approx(outer(r, c)).epsilon(1e-15));
  CHECK(g.params[6] == doctest::Approx(1.5));
  CHECK(g.params[7] == doctest::Approx(-0.25));
}

TEST_CASE("backward matches central differences on 100 random nets") {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto c = oracle::random_gradcheck_case(rng);
    const auto r = oracle::check_net_gradients(c, 1e-5);
    worst = std::max({worst, r.params, r.input});
  }
  MESSAGE("max relative error " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("forward and backward are bit-identical for identical seeds") {
  std::mt19937_64 a(9), b(9);
  nn::DenseNet na({3, 6, 2}, {Activation::relu, Activation::tanh}, false, a);
  nn::DenseNet nb({3, 6, 2}, {Activation::relu, Activation::tanh}, false, b);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 5), up = Eigen::MatrixXd::Random(2, 5);
  CHECK(na == nb);
  CHECK(na.forward(x) == nb.forward(x));
  CHECK(na.backward(x, up).params == nb.backward(x, up).params);
}

TEST_CASE("bias-free nets have no biases and stay bias-free under Adam") {
  std::mt19937_64 rng(6);
  nn::DenseNet net({3, 4, 2}, {Activation::relu, Activation::identity}, true, rng);
  for (const auto& l : net.layers()) CHECK(l.bias.size() == 0);
  CHECK(net.parameter_count() == 3 * 4 + 4 * 2);
  nn::Adam opt(net.parameter_count(), {1e-2});
  Eigen::VectorXd p = net.parameters();
  for (int i = 0; i < 25; ++i) {
    opt.step(p, net.backward(Eigen::MatrixXd::Random(3, 8), Eigen::MatrixXd::Random(2, 8)).params);
    net.set_parameters(p);
  }
  CHECK(net.bias_free());
  for (const auto& l : net.layers()) CHECK(l.bias.size() == 0);
}

TEST_CASE("checkpoint round trip is exact and digest-stable") {
  std::mt19937_64 rng(7);
  nn::DenseNet net({4, 7, 3}, {Activation::tanh, Activation::identity}, false, rng);
  const auto path = (std::filesystem::temp_directory_path() / "ioda_nn_ckpt.json").string();
  nn::save_checkpoint(net, path);
  const auto back = nn::load_checkpoint(path);
  CHECK(back == net);
  CHECK(nn::checkpoint_digest(back) == nn::checkpoint_digest(net));
  json j = net.to_json();
  j["version"] = 99;
  CHECK_THROWS(nn::DenseNet::from_json(j));
}

TEST_CASE("adam: zero gradient from fresh state leaves parameters unchanged") {
  nn::Adam opt(3, {0.1});
  Eigen::VectorXd p(3);
  p << 1.0, -2.0, 3.0;
  const Eigen::VectorXd before = p;
  opt.step(p, Eigen::VectorXd::Zero(3));
  CHECK(p == before);
}

TEST_CASE("adam: first step moves each coordinate by about -lr*sign(g)") {
  nn::Adam opt(3, {0.01});
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3), g(3);
  g << 0.5, -3.0, 1e-3;
  opt.step(p, g);
  CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(p[2] == doctest::Approx(-0.01).epsilon(1e-4));
}

TEST_CASE("adam: 10-step sequence matches the frozen scripted reference") {
  nn::Adam opt(3, {0.01, 0.9, 0.999, 1e-8});
  Eigen::VectorXd p(3);
  p << 0.5, -1.0, 2.0;
  for (int t = 1; t <= 10; ++t) {
    Eigen::VectorXd g(3);
    g << 0.1 * t, -0.2, std::sin(static_cast<double>(t));
    opt.step(p, g);
  }
  CHECK(opt.steps() == 10);
  // Reference values from an independent scalar implementation of the update.
  CHECK(p[0] == doctest::Approx(0.40154109172380353).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(-0.900000005).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(1.9634542710500307).epsilon(1e-12));
}

TEST_CASE("adam: non-finite gradient is rejected without touching state") {
  nn::Adam opt(2, {0.1});
  Eigen::VectorXd p(2);
  p << 1.0, 2.0;
  opt.step(p, Eigen::Vector2d(0.1, 0.2));
  const Eigen::VectorXd p1 = p, m1 = opt.first_moment(), v1 = opt.second_moment();
  Eigen::VectorXd bad(2);
  bad << 0.1, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(opt.step(p, bad), nn::NonFiniteGradient);
  CHECK(p == p1);
  CHECK(opt.first_moment() == m1);
  CHECK(opt.second_moment() == v1);
  CHECK(opt.steps() == 1);
}

}
