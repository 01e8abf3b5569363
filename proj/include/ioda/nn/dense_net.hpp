#pragma once

#include "ioda/core/json_io.hpp"
#include "ioda/core/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace ioda::nn {

enum class Activation { relu, tanh, identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // empty when the net is bias-free
  Activation activation = Activation::identity;
};

/// Intermediate values kept by a forward pass so that backward() can reuse them.
/// Columns are samples.
struct Tape {
  std::vector<Eigen::MatrixXd> inputs;  // input of each layer
  std::vector<Eigen::MatrixXd> outputs; // post-activation output of each layer
};

/// Gradients laid out like DenseNet::parameters().
struct Gradients {
  Eigen::VectorXd params;
  Eigen::MatrixXd input;  // d(upstream . output)/d(input), one column per sample
};

/// Fully connected feed-forward network in 64-bit floating point.
class DenseNet {
 public:
  DenseNet() = default;

  /// `dims` lists layer widths including input and output; `activations` has one entry per layer.
  DenseNet(const std::vector<std::size_t>& dims, const std::vector<Activation>& activations,
           bool bias_free, std::mt19937_64& rng);

  explicit DenseNet(std::vector<DenseLayer> layers, bool bias_free = false);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  bool bias_free() const { return bias_free_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t parameter_count() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;

  /// Gradient of sum(upstream .* forward(x)) with respect to every parameter and to x.
  Gradients backward(const Tape& tape, const Eigen::MatrixXd& upstream) const;
  Gradients backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& upstream) const;
  /// Input gradient only; skips the parameter gradients.
  Eigen::MatrixXd backward_input(const Tape& tape, const Eigen::MatrixXd& upstream) const;

  /// Flat parameter vector: per layer, row-major weight then bias (if present).
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);

  json to_json() const;
  static DenseNet from_json(const json& j);

  friend bool operator==(const DenseNet& a, const DenseNet& b);

 private:
  void check_chain() const;

  std::vector<DenseLayer> layers_;
  bool bias_free_ = false;
};

void save_checkpoint(const DenseNet& net, const std::string& path);
DenseNet load_checkpoint(const std::string& path);
/// Digest of the canonical checkpoint serialization.
std::string checkpoint_digest(const DenseNet& net);

}  // namespace ioda::nn
