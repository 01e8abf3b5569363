#pragma once

#include "ioda/core/types.hpp"

#include <string>
#include <vector>

namespace ioda::ood {

/// A state is out-of-distribution when its score is strictly greater than the threshold.
class OodDetector {
 public:
  virtual ~OodDetector() = default;
  virtual std::string kind() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual double score(const StateVector& s) const = 0;
  virtual double threshold() const = 0;

  bool is_ood(const StateVector& s) const { return score(s) > threshold(); }
};

/// Nearest-rank quantile: the ceil(q*n)-th smallest value.
double nearest_rank_quantile(std::vector<double> values, double q);

}  // namespace ioda::ood
