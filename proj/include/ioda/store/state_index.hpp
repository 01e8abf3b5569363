#pragma once

#include "ioda/store/rollout.hpp"

#include <limits>
#include <string>

namespace ioda::store {

enum class Metric { l1, weighted_l1 };
std::string to_string(Metric m);

struct Match {
  std::size_t index = 0;  // column in insertion order
  StateRef ref;
  double distance = std::numeric_limits<double>::infinity();
};

/// Nearest-state lookup over a frozen set of states under (weighted) L1.
///
/// Brute force is the reference semantics: the result minimizes the metric and ties resolve to the
/// lowest insertion index. The optional k-d tree returns the identical index.
class StateIndex {
 public:
  static constexpr std::size_t kNoExclusion = std::numeric_limits<std::size_t>::max();

  StateIndex() = default;
  StateIndex(Eigen::MatrixXd points, std::vector<StateRef> refs, Eigen::VectorXd weights, bool accelerate = true);

  static StateIndex from_history(const RolloutHistory& history, bool accelerate = true);
  static StateIndex from_history(const RolloutHistory& history, const Eigen::VectorXd& weights, bool accelerate = true);

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.rows()); }
  bool accelerated() const { return !nodes_.empty(); }
  Metric metric() const { return metric_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  StateVector point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  const StateRef& ref(std::size_t i) const { return refs_[i]; }

  double distance(const StateVector& a, const StateVector& b) const;

  Match nearest(const StateVector& query) const { return nearest_excluding(query, kNoExclusion); }
  Match nearest_brute_force(const StateVector& query, std::size_t excluded = kNoExclusion) const;
  /// Nearest state other than the one at `excluded` (leave-one-out queries).
  Match nearest_excluding(const StateVector& query, std::size_t excluded) const;

 private:
  struct Node {
    int split_dim = -1;  // -1 for leaves
    double split_value = 0.0;
    std::size_t left = 0, right = 0;
    std::size_t begin = 0, end = 0;  // range into order_ for leaves
  };

  void check_query(const StateVector& q) const;
  double column_distance(const StateVector& q, std::size_t i) const;
  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, const StateVector& q, Eigen::VectorXd& offsets, double box_distance,
              std::size_t excluded, Match& best) const;
  void consider(std::size_t i, const StateVector& q, std::size_t excluded, Match& best) const;

  Eigen::MatrixXd points_;
  std::vector<StateRef> refs_;
  Eigen::VectorXd weights_;
  Metric metric_ = Metric::l1;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace ioda::store
