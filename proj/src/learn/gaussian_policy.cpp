#include "ioda/learn/gaussian_policy.hpp"

#include <cmath>
#include <numbers>

namespace ioda::learn {

namespace {
constexpr double kSquashEps = 1e-6;
constexpr int kManifestVersion = 1;
}  // namespace

GaussianPolicy::GaussianPolicy(nn::DenseNet actor, ActionBounds bounds, StateVector state_offset,
                               StateVector state_scale, std::vector<bool> active_dims)
    : actor_(std::move(actor)),
      bounds_(std::move(bounds)),
      offset_(std::move(state_offset)),
      scale_(std::move(state_scale)),
      active_(std::move(active_dims)) {
  if (active_.size() != bounds_.dim()) throw DimensionError("GaussianPolicy: active mask length != action dim");
  for (std::size_t i = 0; i < active_.size(); ++i)
    if (active_[i]) active_index_.push_back(static_cast<Eigen::Index>(i));
  if (active_index_.empty()) throw DimensionError("GaussianPolicy: no active action dimension");
  if (offset_.size() != scale_.size()) throw DimensionError("GaussianPolicy: offset/scale mismatch");
  if (actor_.input_dim() != state_dim()) throw DimensionError("GaussianPolicy: actor input != state dim");
  if (actor_.output_dim() != 2 * active_count())
    throw DimensionError("GaussianPolicy: actor output must be 2 x active dims");
}

Eigen::MatrixXd GaussianPolicy::normalize_states(const Eigen::MatrixXd& states) const {
  if (static_cast<std::size_t>(states.rows()) != state_dim())
    throw DimensionError("GaussianPolicy: state dimension mismatch");
  return (states.colwise() - offset_).array().colwise() / scale_.array();
}

ActionVector GaussianPolicy::to_env_action(const Eigen::VectorXd& normalized_active) const {
  ActionVector a = bounds_.center;
  for (std::size_t k = 0; k < active_index_.size(); ++k) {
    const Eigen::Index d = active_index_[k];
    a[d] = bounds_.center[d] + bounds_.half_range[d] * normalized_active[static_cast<Eigen::Index>(k)];
  }
  return a;
}

Eigen::VectorXd GaussianPolicy::to_normalized(const ActionVector& env_action) const {
  Eigen::VectorXd n(static_cast<Eigen::Index>(active_count()));
  for (std::size_t k = 0; k < active_index_.size(); ++k) {
    const Eigen::Index d = active_index_[k];
    n[static_cast<Eigen::Index>(k)] = (env_action[d] - bounds_.center[d]) / bounds_.half_range[d];
  }
  return n;
}

Eigen::VectorXd squashed_log_prob(const Eigen::MatrixXd& log_std, const Eigen::MatrixXd& noise,
                                  const Eigen::MatrixXd& action) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd per_dim = -0.5 * noise.array().square() - log_std.array() - half_log_2pi -
                                  (1.0 - action.array().square() + kSquashEps).log();
  return per_dim.colwise().sum().transpose();
}

SquashedSample GaussianPolicy::sample(const Eigen::MatrixXd& normalized_states, const Eigen::MatrixXd& noise,
                                      nn::Tape* tape) const {
  const auto k = static_cast<Eigen::Index>(active_count());
  const Eigen::MatrixXd out = tape ? actor_.forward(normalized_states, *tape) : actor_.forward(normalized_states);
  SquashedSample s;
  s.mean = out.topRows(k);
  const Eigen::MatrixXd raw = out.bottomRows(k);
  s.log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.clipped = ((raw.array() < kLogStdMin) || (raw.array() > kLogStdMax)).cast<double>().matrix();
  s.noise = noise;
  s.action = (s.mean.array() + s.log_std.array().exp() * noise.array()).tanh().matrix();
  s.log_prob = squashed_log_prob(s.log_std, noise, s.action);
  return s;
}

ActionVector GaussianPolicy::act(const StateVector& s, bool deterministic, std::mt19937_64* rng) const {
  require_dim(s, state_dim(), "GaussianPolicy::act");
  const Eigen::VectorXd x = (s - offset_).cwiseQuotient(scale_);
  const Eigen::VectorXd out = actor_.forward(x);
  const auto k = static_cast<Eigen::Index>(active_count());
  Eigen::VectorXd u = out.head(k);
  if (!deterministic) {
    if (rng == nullptr) throw Error("GaussianPolicy::act: stochastic draw needs an rng");
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::VectorXd log_std = out.tail(k).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
    for (Eigen::Index i = 0; i < k; ++i) u[i] += std::exp(log_std[i]) * normal(*rng);
  }
  return to_env_action(u.array().tanh().matrix());
}

json GaussianPolicy::manifest_json() const {
  return json{{"bounds_center", to_json(bounds_.center)},
              {"bounds_half_range", to_json(bounds_.half_range)},
              {"state_offset", to_json(offset_)},
              {"state_scale", to_json(scale_)},
              {"active_dims", active_}};
}

bool operator==(const GaussianPolicy& a, const GaussianPolicy& b) {
  return a.actor_ == b.actor_ && a.bounds_.center == b.bounds_.center &&
         a.bounds_.half_range == b.bounds_.half_range && a.offset_ == b.offset_ && a.scale_ == b.scale_ &&
         a.active_ == b.active_;
}

void save_policy(const GaussianPolicy& policy, const std::filesystem::path& manifest_path,
                 const std::string& env_id, const std::string& config_digest) {
  std::filesystem::path actor_path = manifest_path;
  actor_path.replace_extension(".actor.json");
  nn::save_checkpoint(policy.actor(), actor_path.string());
  json m = policy.manifest_json();
  m["format"] = "ioda.policy";
  m["version"] = kManifestVersion;
  m["env"] = env_id;
  m["config_digest"] = config_digest;
  m["actor_checkpoint"] = actor_path.filename().string();
  m["actor_digest"] = nn::checkpoint_digest(policy.actor());
  write_json_file(manifest_path, m);
}

LoadedPolicy load_policy(const std::filesystem::path& manifest_path) {
  const json m = read_json_file(manifest_path);
  if (require_field(m, "format") != "ioda.policy") throw ArchiveError("not a policy manifest");
  if (require_field(m, "version").get<int>() != kManifestVersion) throw ArchiveError("unsupported policy manifest");
  const auto actor_path = manifest_path.parent_path() / require_field(m, "actor_checkpoint").get<std::string>();
  nn::DenseNet actor = nn::load_checkpoint(actor_path.string());
  LoadedPolicy out;
  out.actor_digest = nn::checkpoint_digest(actor);
  if (out.actor_digest != require_field(m, "actor_digest").get<std::string>())
    throw ArchiveError("actor checkpoint digest does not match manifest");
  ActionBounds bounds{vector_from_json(require_field(m, "bounds_center")),
                      vector_from_json(require_field(m, "bounds_half_range"))};
  out.policy = GaussianPolicy(std::move(actor), std::move(bounds), vector_from_json(require_field(m, "state_offset")),
                              vector_from_json(require_field(m, "state_scale")),
                              require_field(m, "active_dims").get<std::vector<bool>>());
  out.env_id = require_field(m, "env").get<std::string>();
  out.config_digest = require_field(m, "config_digest").get<std::string>();
  return out;
}

}  // namespace ioda::learn
