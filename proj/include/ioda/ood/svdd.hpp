#pragma once

#include "ioda/nn/dense_net.hpp"
#include "ioda/ood/detector.hpp"

#include <filesystem>

namespace ioda::ood {

struct SvddConfig {
  std::vector<std::size_t> hidden{32, 32};
  std::size_t embedding_dim = 8;
  std::size_t epochs = 30;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double quantile = 0.99;
  std::uint64_t seed = 7;
  /// Affine input normalization; empty means identity.
  Eigen::VectorXd input_offset;
  Eigen::VectorXd input_scale;

  json to_json() const;
};

/// Missing keys keep their defaults.
SvddConfig svdd_config_from_json(const json& j);

class SvddDivergence : public Error {
 public:
  using Error::Error;
};

struct SvddFitLog {
  double mean_radius_before = 0.0;
  double mean_radius_after = 0.0;
  std::vector<double> epoch_loss;  // mean squared radius per epoch
};

/// One-class detector: bias-free embedding network, fixed center, calibrated radius.
class SvddDetector final : public OodDetector {
 public:
  SvddDetector() = default;
  SvddDetector(nn::DenseNet net, Eigen::VectorXd center, double radius, double quantile, Eigen::VectorXd input_offset,
               Eigen::VectorXd input_scale);

  std::string kind() const override { return "svdd"; }
  std::size_t state_dim() const override { return net_.input_dim(); }
  double score(const StateVector& s) const override;
  double threshold() const override { return radius_; }
  Eigen::VectorXd scores(const Eigen::MatrixXd& states) const;

  const nn::DenseNet& net() const { return net_; }
  const Eigen::VectorXd& center() const { return center_; }
  double quantile() const { return quantile_; }
  Eigen::VectorXd embed(const StateVector& s) const;
  const Eigen::VectorXd& input_offset() const { return offset_; }
  const Eigen::VectorXd& input_scale() const { return scale_; }

  /// Radii of the training states at calibration time.
  std::vector<double> calibration_radii;
  std::string training_digest;

 private:

  nn::DenseNet net_;
  Eigen::VectorXd center_;
  double radius_ = 0.0;
  double quantile_ = 0.99;
  Eigen::VectorXd offset_;
  Eigen::VectorXd scale_;
};

/// Fits on states given as columns (at least 100 of them).
SvddDetector fit_svdd(const Eigen::MatrixXd& states, const SvddConfig& cfg, SvddFitLog* log = nullptr);

/// Writes the embedding net in checkpoint format at `path` plus a JSON sidecar next to it.
void save_svdd(const SvddDetector& detector, const std::filesystem::path& path);
SvddDetector load_svdd(const std::filesystem::path& path);
std::filesystem::path svdd_sidecar_path(const std::filesystem::path& path);

}  // namespace ioda::ood
