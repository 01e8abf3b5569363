#include "ioda/ood/svdd.hpp"

#include "ioda/nn/adam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ioda::ood {

namespace {
constexpr int kSidecarVersion = 1;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty set");
  if (!(q > 0.0 && q <= 1.0)) throw Error("quantile must be in (0,1]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

json SvddConfig::to_json() const {
  return json{{"hidden", hidden},       {"embedding_dim", embedding_dim}, {"epochs", epochs},
              {"batch_size", batch_size}, {"learning_rate", learning_rate}, {"quantile", quantile},
              {"seed", seed}};
}

SvddConfig svdd_config_from_json(const json& j) {
  SvddConfig c;
  if (j.contains("hidden")) c.hidden = j["hidden"].get<std::vector<std::size_t>>();
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.quantile = j.value("quantile", c.quantile);
  c.seed = j.value("seed", c.seed);
  return c;
}

SvddDetector::SvddDetector(nn::DenseNet net, Eigen::VectorXd center, double radius, double quantile,
                           Eigen::VectorXd input_offset, Eigen::VectorXd input_scale)
    : net_(std::move(net)),
      center_(std::move(center)),
      radius_(radius),
      quantile_(quantile),
      offset_(std::move(input_offset)),
      scale_(std::move(input_scale)) {
  if (!net_.bias_free()) throw Error("SvddDetector: embedding net must be bias-free");
  require_dim(center_, net_.output_dim(), "SvddDetector center");
  require_dim(offset_, net_.input_dim(), "SvddDetector offset");
  require_dim(scale_, net_.input_dim(), "SvddDetector scale");
}

Eigen::VectorXd SvddDetector::embed(const StateVector& s) const {
  require_dim(s, state_dim(), "SvddDetector::embed");
  return net_.forward(Eigen::VectorXd((s - offset_).cwiseQuotient(scale_)));
}

double SvddDetector::score(const StateVector& s) const { return (embed(s) - center_).norm(); }

Eigen::VectorXd SvddDetector::scores(const Eigen::MatrixXd& states) const {
  if (static_cast<std::size_t>(states.rows()) != state_dim()) throw DimensionError("SvddDetector::scores");
  // Per column so that batch and single-state scores are bit-identical.
  Eigen::VectorXd out(states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) out[i] = score(states.col(i));
  return out;
}

SvddDetector fit_svdd(const Eigen::MatrixXd& states, const SvddConfig& cfg, SvddFitLog* log) {
  const auto n = states.cols();
  if (n < 100) throw Error("fit_svdd: need at least 100 training states");
  const auto dim = static_cast<std::size_t>(states.rows());
  const Eigen::VectorXd offset = cfg.input_offset.size() ? cfg.input_offset : Eigen::VectorXd::Zero(states.rows());
  const Eigen::VectorXd scale = cfg.input_scale.size() ? cfg.input_scale : Eigen::VectorXd::Ones(states.rows());
  require_dim(offset, dim, "SvddConfig input_offset");
  require_dim(scale, dim, "SvddConfig input_scale");
  const Eigen::MatrixXd x = (states.colwise() - offset).array().colwise() / scale.array();

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> dims{dim};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(cfg.embedding_dim);
  std::vector<nn::Activation> acts(cfg.hidden.size(), nn::Activation::relu);
  acts.push_back(nn::Activation::identity);
  nn::DenseNet net(dims, acts, /*bias_free=*/true, rng);

  // Center fixed from the initial forward pass.
  const Eigen::VectorXd center = net.forward(x).rowwise().mean();
  auto mean_radius = [&](const nn::DenseNet& m) { return (m.forward(x).colwise() - center).colwise().norm().mean(); };
  SvddFitLog local;
  local.mean_radius_before = mean_radius(net);

  nn::Adam opt(net.parameter_count(), {cfg.learning_rate});
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd params = net.parameters();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const auto b = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(x.rows(), b);
      for (Eigen::Index j = 0; j < b; ++j) xb.col(j) = x.col(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(j)]));
      nn::Tape tape;
      const Eigen::MatrixXd diff = net.forward(xb, tape).colwise() - center;
      const double loss = diff.colwise().squaredNorm().mean();
      if (!std::isfinite(loss)) throw SvddDivergence("fit_svdd: non-finite loss in epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(b);
      const Eigen::VectorXd grad = net.backward(tape, (2.0 / static_cast<double>(b)) * diff).params;
      try {
        opt.step(params, grad);
      } catch (const nn::NonFiniteGradient& e) {
        throw SvddDivergence(e.what());
      }
      net.set_parameters(params);
    }
    local.epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }

  SvddDetector det(net, center, 0.0, cfg.quantile, offset, scale);
  const Eigen::VectorXd radii = det.scores(states);
  det.calibration_radii.assign(radii.data(), radii.data() + radii.size());
  det = SvddDetector(net, center, nearest_rank_quantile(det.calibration_radii, cfg.quantile), cfg.quantile, offset,
                     scale);
  det.calibration_radii.assign(radii.data(), radii.data() + radii.size());
  local.mean_radius_after = radii.mean();
  if (log) *log = std::move(local);
  return det;
}

std::filesystem::path svdd_sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p.replace_extension(".svdd.json");
  return p;
}

void save_svdd(const SvddDetector& d, const std::filesystem::path& path) {
  nn::save_checkpoint(d.net(), path.string());
  write_json_file(svdd_sidecar_path(path), json{{"format", "ioda.svdd"},
                                                {"version", kSidecarVersion},
                                                {"net_checkpoint", path.filename().string()},
                                                {"net_digest", nn::checkpoint_digest(d.net())},
                                                {"center", to_json(d.center())},
                                                {"radius", d.threshold()},
                                                {"quantile", d.quantile()},
                                                {"input_offset", to_json(d.input_offset())},
                                                {"input_scale", to_json(d.input_scale())},
                                                {"training_digest", d.training_digest},
                                                {"calibration_radii", d.calibration_radii}});
}

SvddDetector load_svdd(const std::filesystem::path& path) {
  const json side = read_json_file(svdd_sidecar_path(path));
  if (side.value("format", "") != "ioda.svdd") throw ArchiveError("load_svdd: not an svdd sidecar");
  if (side.value("version", 0) != kSidecarVersion) throw ArchiveError("load_svdd: unsupported sidecar version");
  nn::DenseNet net = nn::load_checkpoint(path.string());
  if (nn::checkpoint_digest(net) != require_field(side, "net_digest").get<std::string>())
    throw ArchiveError("load_svdd: checkpoint digest mismatch");
  SvddDetector d(std::move(net), vector_from_json(require_field(side, "center")),
                 require_field(side, "radius").get<double>(), require_field(side, "quantile").get<double>(),
                 vector_from_json(require_field(side, "input_offset")),
                 vector_from_json(require_field(side, "input_scale")));
  d.training_digest = side.value("training_digest", "");
  d.calibration_radii = side.value("calibration_radii", std::vector<double>{});
  return d;
}

}  // namespace ioda::ood
