#pragma once

#include "exkin/spatial_mesh.hpp"

namespace exkin {

// Diffuse-reflection machinery on the obstacle wall.  For each wall face the
// velocity nodes split into outgoing (v.n > 0, n pointing into the obstacle)
// and incoming halves.  The re-emission profile is the wall Maxwellian shape
// mu / sqrt(mu_c), normalized discretely so that the re-emitted mass flux
// equals the outgoing flux z_{gamma+}(f) exactly on the lattice.
class BoundaryOperator {
 public:
  BoundaryOperator(const SpatialMesh& mesh, const VelocityGrid& grid,
                   const DriftContext& drift);

  const SpatialMesh& mesh() const { return *mesh_; }
  const VelocityGrid& grid() const { return *grid_; }
  int n_faces() const { return static_cast<int>(face_ids_.size()); }
  int face_id(int k) const { return face_ids_[k]; }

  // outgoing mass flux z_{gamma+}(f) = sum_{v.n>0} w sqrt(mu_c) |v.n| f
  double z_plus(int k, const Eigen::VectorXd& f_face) const;
  // incoming mass flux of a trace (v.n < 0 half)
  double z_minus(int k, const Eigen::VectorXd& f_face) const;

  // P_gamma^c f on the incoming half: emission(v) * z_plus(f); zero on the
  // outgoing half.
  Eigen::VectorXd apply_diffuse_reflection(int k, const Eigen::VectorXd& f_out) const;
  // same, but fed directly with a precomputed outgoing flux
  Eigen::VectorXd emission_times(int k, double z) const;

  const Eigen::VectorXd& emission(int k) const { return emission_[k]; }
  const std::vector<int>& outgoing_nodes(int k) const { return out_nodes_[k]; }
  const std::vector<int>& incoming_nodes(int k) const { return in_nodes_[k]; }
  // |v.n| for all nodes at face k
  const Eigen::VectorXd& vdotn_abs(int k) const { return vn_abs_[k]; }
  double normalization(int k) const { return norm_const_[k]; }  // vs sqrt(2 pi)

 private:
  const SpatialMesh* mesh_ = nullptr;
  const VelocityGrid* grid_ = nullptr;
  DriftContext drift_;
  std::vector<int> face_ids_;
  std::vector<std::vector<int>> out_nodes_, in_nodes_;
  std::vector<Eigen::VectorXd> emission_;  // normalized incoming profile
  std::vector<Eigen::VectorXd> vn_abs_;
  std::vector<double> norm_const_;
  Eigen::VectorXd smu_;
};

}  // namespace exkin
