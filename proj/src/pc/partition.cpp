#include "ioda/pc/partition.hpp"

#include <algorithm>

namespace ioda::pc {

AxisPartition::AxisPartition(std::vector<Owner> owners) : owners_(std::move(owners)) {
  if (owners_.empty()) throw Error("AxisPartition: no dimensions");
}

AxisPartition AxisPartition::user_owns(std::size_t action_dim, const std::vector<std::size_t>& user_dims) {
  std::vector<Owner> owners(action_dim, Owner::robot);
  for (std::size_t d : user_dims) {
    if (d >= action_dim) throw DimensionError("AxisPartition: user dimension out of range");
    owners[d] = Owner::user;
  }
  return AxisPartition(std::move(owners));
}

std::vector<std::size_t> AxisPartition::user_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < owners_.size(); ++i)
    if (owners_[i] == Owner::user) out.push_back(i);
  return out;
}

std::vector<std::size_t> AxisPartition::robot_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < owners_.size(); ++i)
    if (owners_[i] == Owner::robot) out.push_back(i);
  return out;
}

void AxisPartition::require_session() const {
  if (user_dims().empty() || robot_dims().empty())
    throw Error("AxisPartition: a session needs at least one user and one robot dimension");
}

json AxisPartition::to_json() const {
  json j = json::array();
  for (Owner o : owners_) j.push_back(o == Owner::user ? "user" : "robot");
  return j;
}

AxisPartition AxisPartition::from_json(const json& j) {
  std::vector<Owner> owners;
  for (const auto& o : j) {
    const auto s = o.get<std::string>();
    if (s == "user")
      owners.push_back(Owner::user);
    else if (s == "robot")
      owners.push_back(Owner::robot);
    else
      throw Error("AxisPartition: unknown owner '" + s + "'");
  }
  return AxisPartition(std::move(owners));
}

namespace {
ActionVector mask(const ActionVector& v, const AxisPartition& p, Owner keep) {
  require_dim(v, p.dim(), "partition mask");
  ActionVector out = ActionVector::Zero(v.size());
  for (std::size_t i = 0; i < p.dim(); ++i)
    if (p.owner(i) == keep) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(i)];
  return out;
}
}  // namespace

ActionVector mask_to_user(const ActionVector& v, const AxisPartition& p) { return mask(v, p, Owner::user); }
ActionVector mask_to_robot(const ActionVector& v, const AxisPartition& p) { return mask(v, p, Owner::robot); }

ActionVector combine(const ActionVector& u, const ActionVector& a, const AxisPartition& p) {
  require_dim(u, p.dim(), "combine user action");
  require_dim(a, p.dim(), "combine robot action");
  ActionVector out(u.size());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[k] = p.user(i) ? u[k] : a[k];
  }
  return out;
}

}  // namespace ioda::pc
