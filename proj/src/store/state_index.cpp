#include "ioda/store/state_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ioda::store {

namespace {
constexpr std::size_t kLeafSize = 12;
// Absorbs rounding differences between the incremental box bound and a direct distance sum.
constexpr double kPruneSlack = 1e-12;
}  // namespace

std::string to_string(Metric m) { return m == Metric::l1 ? "l1" : "weighted_l1"; }

StateIndex::StateIndex(Eigen::MatrixXd points, std::vector<StateRef> refs, Eigen::VectorXd weights, bool accelerate)
    : points_(std::move(points)), refs_(std::move(refs)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(points_.cols()) != refs_.size())
    throw DimensionError("StateIndex: one ref per point required");
  require_dim(weights_, dim(), "StateIndex weights");
  if ((weights_.array() < 0.0).any()) throw Error("StateIndex: weights must be non-negative");
  metric_ = (weights_.array() == 1.0).all() ? Metric::l1 : Metric::weighted_l1;
  if (accelerate && size() > 0) {
    order_.resize(size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * size() / kLeafSize + 2);
    build(0, size());
  }
}

StateIndex StateIndex::from_history(const RolloutHistory& history, bool accelerate) {
  return from_history(history, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(history.state_dim())), accelerate);
}

StateIndex StateIndex::from_history(const RolloutHistory& history, const Eigen::VectorXd& weights, bool accelerate) {
  return StateIndex(history.state_matrix(), history.state_refs(), weights, accelerate);
}

double StateIndex::distance(const StateVector& a, const StateVector& b) const {
  require_dim(a, dim(), "StateIndex::distance");
  require_dim(b, dim(), "StateIndex::distance");
  double d = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) d += weights_[k] * std::abs(a[k] - b[k]);
  return d;
}

double StateIndex::column_distance(const StateVector& q, std::size_t i) const {
  const auto col = points_.col(static_cast<Eigen::Index>(i));
  double d = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) d += weights_[k] * std::abs(q[k] - col[k]);
  return d;
}

void StateIndex::check_query(const StateVector& q) const {
  if (size() == 0) throw Error("StateIndex: query against an empty store");
  require_dim(q, dim(), "StateIndex query");
}

void StateIndex::consider(std::size_t i, const StateVector& q, std::size_t excluded, Match& best) const {
  if (i == excluded) return;
  const double d = column_distance(q, i);
  if (d < best.distance || (d == best.distance && i < best.index)) {
    best.distance = d;
    best.index = i;
  }
}

Match StateIndex::nearest_brute_force(const StateVector& q, std::size_t excluded) const {
  check_query(q);
  Match best;
  best.index = kNoExclusion;
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == excluded) continue;
    const double d = column_distance(q, i);
    if (d < best.distance) {
      best.distance = d;
      best.index = i;
    }
  }
  if (best.index == kNoExclusion) throw Error("StateIndex: no candidate left after exclusion");
  best.ref = refs_[best.index];
  return best;
}

std::size_t StateIndex::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  // Split on the dimension of largest weighted spread.
  int best_dim = -1;
  double best_spread = 0.0;
  for (Eigen::Index k = 0; k < points_.rows(); ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = points_(k, static_cast<Eigen::Index>(order_[i]));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double spread = weights_[k] * (hi - lo);
    if (spread > best_spread) {
      best_spread = spread;
      best_dim = static_cast<int>(k);
    }
  }
  if (best_dim < 0) {  // all points coincide under the metric
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  const auto key = [&](std::size_t i) { return points_(best_dim, static_cast<Eigen::Index>(i)); };
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  const double split = key(order_[mid]);
  // Left holds values <= split, right holds values >= split.
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].split_dim = best_dim;
  nodes_[id].split_value = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void StateIndex::search(std::size_t node_id, const StateVector& q, Eigen::VectorXd& offsets, double box_distance,
                        std::size_t excluded, Match& best) const {
  const Node& node = nodes_[node_id];
  if (node.split_dim < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) consider(order_[i], q, excluded, best);
    return;
  }
  const auto d = static_cast<Eigen::Index>(node.split_dim);
  const double diff = q[d] - node.split_value;
  const std::size_t near = diff <= 0.0 ? node.left : node.right;
  const std::size_t far = diff <= 0.0 ? node.right : node.left;
  search(near, q, offsets, box_distance, excluded, best);

  const double old_offset = offsets[d];
  const double new_offset = std::abs(diff);
  const double far_distance = box_distance - weights_[d] * old_offset + weights_[d] * new_offset;
  if (far_distance <= best.distance * (1.0 + kPruneSlack) + kPruneSlack) {
    offsets[d] = new_offset;
    search(far, q, offsets, far_distance, excluded, best);
    offsets[d] = old_offset;
  }
}

Match StateIndex::nearest_excluding(const StateVector& q, std::size_t excluded) const {
  if (!accelerated()) return nearest_brute_force(q, excluded);
  check_query(q);
  if (excluded != kNoExclusion && size() < 2) throw Error("StateIndex: no candidate left after exclusion");
  Match best;
  best.index = kNoExclusion;
  Eigen::VectorXd offsets = Eigen::VectorXd::Zero(points_.rows());
  search(0, q, offsets, 0.0, excluded, best);
  best.ref = refs_[best.index];
  return best;
}

}  // namespace ioda::store
