#pragma once

#include "ioda/core/json_io.hpp"
#include "ioda/core/types.hpp"

#include <vector>

namespace ioda::pc {

enum class Owner { user, robot };

/// Ownership of each action dimension. A session needs at least one of each owner.
class AxisPartition {
 public:
  AxisPartition() = default;
  explicit AxisPartition(std::vector<Owner> owners);
  /// Every dimension robot-owned except the listed ones.
  static AxisPartition user_owns(std::size_t action_dim, const std::vector<std::size_t>& user_dims);

  std::size_t dim() const { return owners_.size(); }
  Owner owner(std::size_t i) const { return owners_.at(i); }
  bool user(std::size_t i) const { return owner(i) == Owner::user; }
  const std::vector<Owner>& owners() const { return owners_; }
  std::vector<std::size_t> user_dims() const;
  std::vector<std::size_t> robot_dims() const;
  /// Throws unless both owners appear.
  void require_session() const;

  json to_json() const;
  static AxisPartition from_json(const json& j);
  friend bool operator==(const AxisPartition&, const AxisPartition&) = default;

 private:
  std::vector<Owner> owners_;
};

ActionVector mask_to_user(const ActionVector& v, const AxisPartition& p);
ActionVector mask_to_robot(const ActionVector& v, const AxisPartition& p);
/// u on user dims, a on robot dims; both are masked first.
ActionVector combine(const ActionVector& u, const ActionVector& a, const AxisPartition& p);

}  // namespace ioda::pc
