#pragma once

#include "ioda/nn/dense_net.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace ioda::learn {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Quantities of a reparameterized tanh-Gaussian draw, one column per sample.
/// Actions are in normalized [-1, 1] units over the active dimensions only.
struct SquashedSample {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;     // after clipping
  Eigen::MatrixXd clipped;     // 1 where the raw log-std was outside the clip range
  Eigen::MatrixXd noise;
  Eigen::MatrixXd action;      // tanh(mean + std * noise)
  Eigen::VectorXd log_prob;
};

/// Tanh-squashed Gaussian policy over a DenseNet actor that outputs [mean; log_std] for each
/// active action dimension. Inactive dimensions always emit the bound center.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(nn::DenseNet actor, ActionBounds bounds, StateVector state_offset, StateVector state_scale,
                 std::vector<bool> active_dims);

  std::size_t state_dim() const { return static_cast<std::size_t>(offset_.size()); }
  std::size_t action_dim() const { return bounds_.dim(); }
  std::size_t active_count() const { return active_index_.size(); }
  const std::vector<bool>& active_dims() const { return active_; }
  const ActionBounds& bounds() const { return bounds_; }
  const nn::DenseNet& actor() const { return actor_; }
  nn::DenseNet& actor() { return actor_; }
  const StateVector& state_offset() const { return offset_; }
  const StateVector& state_scale() const { return scale_; }

  /// Deterministic: squashed mean. Otherwise a draw from `rng` (required).
  ActionVector act(const StateVector& s, bool deterministic, std::mt19937_64* rng = nullptr) const;

  Eigen::MatrixXd normalize_states(const Eigen::MatrixXd& states) const;
  /// Maps normalized active-dimension actions to a full environment action.
  ActionVector to_env_action(const Eigen::VectorXd& normalized_active) const;
  /// Inverse of to_env_action restricted to active dimensions.
  Eigen::VectorXd to_normalized(const ActionVector& env_action) const;

  /// Draws from normalized states with the given standard-normal noise (k x B).
  SquashedSample sample(const Eigen::MatrixXd& normalized_states, const Eigen::MatrixXd& noise,
                        nn::Tape* tape = nullptr) const;

  json manifest_json() const;
  friend bool operator==(const GaussianPolicy& a, const GaussianPolicy& b);

 private:
  nn::DenseNet actor_;
  ActionBounds bounds_;
  StateVector offset_;
  StateVector scale_;
  std::vector<bool> active_;
  std::vector<Eigen::Index> active_index_;
};

/// Log-density of the squashed sample given pre-squash statistics, summed over dimensions.
Eigen::VectorXd squashed_log_prob(const Eigen::MatrixXd& log_std, const Eigen::MatrixXd& noise,
                                  const Eigen::MatrixXd& action);

/// Writes the manifest at `manifest_path` and the actor checkpoint next to it.
void save_policy(const GaussianPolicy& policy, const std::filesystem::path& manifest_path,
                 const std::string& env_id, const std::string& config_digest);

struct LoadedPolicy {
  GaussianPolicy policy;
  std::string env_id;
  std::string config_digest;
  std::string actor_digest;
};
LoadedPolicy load_policy(const std::filesystem::path& manifest_path);

}  // namespace ioda::learn
