#include "ioda/nn/dense_net.hpp"

#include "ioda/core/digest.hpp"

#include <cmath>

namespace ioda::nn {

namespace {

constexpr int kCheckpointVersion = 1;

void apply_activation(Activation a, Eigen::MatrixXd& m) {
  switch (a) {
    case Activation::relu: m = m.cwiseMax(0.0); break;
    case Activation::tanh: m = m.array().tanh().matrix(); break;
    case Activation::identity: break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through the layer output.
void apply_activation_grad(Activation a, const Eigen::MatrixXd& out, Eigen::MatrixXd& grad) {
  switch (a) {
    case Activation::relu: grad = (out.array() > 0.0).select(grad.array(), 0.0).matrix(); break;
    case Activation::tanh: grad = (grad.array() * (1.0 - out.array().square())).matrix(); break;
    case Activation::identity: break;
  }
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw ArchiveError("unknown activation '" + name + "'");
}

DenseNet::DenseNet(const std::vector<std::size_t>& dims, const std::vector<Activation>& activations,
                   bool bias_free, std::mt19937_64& rng)
    : bias_free_(bias_free) {
  if (dims.size() < 2 || activations.size() != dims.size() - 1)
    throw DimensionError("DenseNet: need one activation per layer");
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(dims[l]);
    const auto fan_out = static_cast<Eigen::Index>(dims[l + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    DenseLayer layer;
    layer.activation = activations[l];
    layer.weight.resize(fan_out, fan_in);
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weight(r, c) = u(rng);
    if (!bias_free) {
      layer.bias.resize(fan_out);
      for (Eigen::Index r = 0; r < fan_out; ++r) layer.bias[r] = u(rng);
    }
    layers_.push_back(std::move(layer));
  }
}

DenseNet::DenseNet(std::vector<DenseLayer> layers, bool bias_free)
    : layers_(std::move(layers)), bias_free_(bias_free) {
  check_chain();
}

void DenseNet::check_chain() const {
  if (layers_.empty()) throw DimensionError("DenseNet: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows())
      throw DimensionError("DenseNet: layer dimensions do not chain");
    if (bias_free_ && layer.bias.size() != 0) throw DimensionError("DenseNet: bias-free net has a bias");
    if (!bias_free_ && layer.bias.size() != layer.weight.rows())
      throw DimensionError("DenseNet: bias length mismatch");
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw Error("DenseNet: non-finite parameter");
  }
}

std::size_t DenseNet::input_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t DenseNet::output_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const {
  require_dim(x, input_dim(), "DenseNet::forward");
  Eigen::MatrixXd m = x;
  return forward(m).col(0);
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.rows()) != input_dim())
    throw DimensionError("DenseNet::forward: input rows != input_dim");
  Eigen::MatrixXd h = x;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * h;
    if (layer.bias.size() != 0) z.colwise() += layer.bias;
    apply_activation(layer.activation, z);
    h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  if (static_cast<std::size_t>(x.rows()) != input_dim())
    throw DimensionError("DenseNet::forward: input rows != input_dim");
  tape.inputs.clear();
  tape.outputs.clear();
  tape.inputs.reserve(layers_.size());
  tape.outputs.reserve(layers_.size());
  Eigen::MatrixXd h = x;
  for (const auto& layer : layers_) {
    tape.inputs.push_back(h);
    Eigen::MatrixXd z = layer.weight * h;
    if (layer.bias.size() != 0) z.colwise() += layer.bias;
    apply_activation(layer.activation, z);
    tape.outputs.push_back(z);
    h = std::move(z);
  }
  return h;
}

Gradients DenseNet::backward(const Tape& tape, const Eigen::MatrixXd& upstream) const {
  if (tape.inputs.size() != layers_.size()) throw DimensionError("DenseNet::backward: tape/net mismatch");
  if (static_cast<std::size_t>(upstream.rows()) != output_dim() ||
      upstream.cols() != tape.outputs.back().cols())
    throw DimensionError("DenseNet::backward: upstream shape mismatch");

  Gradients g;
  g.params.resize(static_cast<Eigen::Index>(parameter_count()));
  // Parameter offsets per layer, filled back to front.
  std::vector<Eigen::Index> offset(layers_.size());
  Eigen::Index running = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offset[l] = running;
    running += layers_[l].weight.size() + layers_[l].bias.size();
  }

  Eigen::MatrixXd delta = upstream;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    apply_activation_grad(layer.activation, tape.outputs[li], delta);
    const Eigen::MatrixXd dw = delta * tape.inputs[li].transpose();
    Eigen::Index k = offset[li];
    for (Eigen::Index r = 0; r < dw.rows(); ++r)
      for (Eigen::Index c = 0; c < dw.cols(); ++c) g.params[k++] = dw(r, c);
    if (layer.bias.size() != 0) {
      const Eigen::VectorXd db = delta.rowwise().sum();
      g.params.segment(k, db.size()) = db;
    }
    delta = layer.weight.transpose() * delta;
  }
  g.input = std::move(delta);
  return g;
}

Gradients DenseNet::backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& upstream) const {
  Tape tape;
  forward(x, tape);
  return backward(tape, upstream);
}

Eigen::MatrixXd DenseNet::backward_input(const Tape& tape, const Eigen::MatrixXd& upstream) const {
  if (tape.inputs.size() != layers_.size()) throw DimensionError("DenseNet::backward_input: tape/net mismatch");
  Eigen::MatrixXd delta = upstream;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    apply_activation_grad(layers_[li].activation, tape.outputs[li], delta);
    delta = layers_[li].weight.transpose() * delta;
  }
  return delta;
}

Eigen::VectorXd DenseNet::parameters() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) flat[k++] = layer.weight(r, c);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) flat[k++] = layer.bias[r];
  }
  return flat;
}

void DenseNet::set_parameters(const Eigen::VectorXd& flat) {
  require_dim(flat, parameter_count(), "DenseNet::set_parameters");
  if (!flat.allFinite()) throw Error("DenseNet::set_parameters: non-finite parameter");
  Eigen::Index k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = flat[k++];
  }
}

json DenseNet::to_json() const {
  json layers = json::array();
  for (const auto& layer : layers_) {
    json jl;
    jl["in"] = layer.weight.cols();
    jl["out"] = layer.weight.rows();
    jl["activation"] = to_string(layer.activation);
    jl["weight"] = matrix_to_json(layer.weight);
    if (!bias_free_) jl["bias"] = ioda::to_json(layer.bias);
    layers.push_back(std::move(jl));
  }
  return json{{"format", "ioda.densenet"},
              {"version", kCheckpointVersion},
              {"input_dim", input_dim()},
              {"output_dim", output_dim()},
              {"bias_free", bias_free_},
              {"layers", std::move(layers)}};
}

DenseNet DenseNet::from_json(const json& j) {
  if (require_field(j, "format") != "ioda.densenet") throw ArchiveError("not a densenet checkpoint");
  if (require_field(j, "version").get<int>() != kCheckpointVersion)
    throw ArchiveError("unsupported densenet checkpoint version");
  const bool bias_free = require_field(j, "bias_free").get<bool>();
  std::vector<DenseLayer> layers;
  for (const auto& jl : require_field(j, "layers")) {
    DenseLayer layer;
    const auto in = require_field(jl, "in").get<Eigen::Index>();
    const auto out = require_field(jl, "out").get<Eigen::Index>();
    layer.activation = activation_from_string(require_field(jl, "activation").get<std::string>());
    layer.weight = matrix_from_json(require_field(jl, "weight"), out, in);
    if (!bias_free) {
      layer.bias = vector_from_json(require_field(jl, "bias"));
      if (layer.bias.size() != out) throw ArchiveError("bias length mismatch");
    } else if (jl.contains("bias")) {
      throw ArchiveError("bias-free checkpoint carries a bias");
    }
    layers.push_back(std::move(layer));
  }
  try {
    return DenseNet(std::move(layers), bias_free);
  } catch (const DimensionError& e) {
    throw ArchiveError(e.what());
  }
}

bool operator==(const DenseNet& a, const DenseNet& b) {
  if (a.bias_free_ != b.bias_free_ || a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto& x = a.layers_[l];
    const auto& y = b.layers_[l];
    if (x.activation != y.activation || x.weight.rows() != y.weight.rows() ||
        x.weight.cols() != y.weight.cols() || x.bias.size() != y.bias.size())
      return false;
    if (x.weight != y.weight || x.bias != y.bias) return false;
  }
  return true;
}

void save_checkpoint(const DenseNet& net, const std::string& path) { write_json_file(path, net.to_json()); }

DenseNet load_checkpoint(const std::string& path) { return DenseNet::from_json(read_json_file(path)); }

std::string checkpoint_digest(const DenseNet& net) { return digest_hex(net.to_json().dump()); }

}  // namespace ioda::nn
