#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ioda {

/// Real-valued state of an environment as seen by policies, detectors and the rollout store.
using StateVector = Eigen::VectorXd;
/// Real-valued action; one entry per action dimension.
using ActionVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a persisted artifact cannot be read back.
class ArchiveError : public Error {
 public:
  using Error::Error;
};

/// Per-dimension symmetric box bounds centered at `center` with half-widths `half_range`.
struct ActionBounds {
  Eigen::VectorXd center;
  Eigen::VectorXd half_range;

  std::size_t dim() const { return static_cast<std::size_t>(center.size()); }
  Eigen::VectorXd low() const { return center - half_range; }
  Eigen::VectorXd high() const { return center + half_range; }
  Eigen::VectorXd clip(const Eigen::VectorXd& a) const { return a.cwiseMax(low()).cwiseMin(high()); }
};

inline void require_dim(const Eigen::VectorXd& v, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(v.size()) != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(v.size()));
  }
}

}  // namespace ioda
