#include "exkin/boundary.hpp"

#include <cmath>
#include <numbers>

namespace exkin {

BoundaryOperator::BoundaryOperator(const SpatialMesh& mesh, const VelocityGrid& grid,
                                   const DriftContext& drift)
    : mesh_(&mesh), grid_(&grid), drift_(drift) {
  face_ids_ = mesh.wall_faces();
  const int nf = n_faces();
  const int nv = grid.size();
  smu_ = grid.sample_sqrt_mu_c(drift);

  out_nodes_.resize(nf);
  in_nodes_.resize(nf);
  emission_.resize(nf);
  vn_abs_.resize(nf);
  norm_const_.resize(nf);

  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  for (int k = 0; k < nf; ++k) {
    const Vec3 n = mesh.faces()[face_ids_[k]].normal;  // into the obstacle
    vn_abs_[k].resize(nv);
    Eigen::VectorXd prof = Eigen::VectorXd::Zero(nv);
    double mass_in = 0.0;
    for (int i = 0; i < nv; ++i) {
      const Vec3& v = grid.node(i);
      const double vn = v.dot(n);
      vn_abs_[k][i] = std::abs(vn);
      if (vn > 0)
        out_nodes_[k].push_back(i);
      else if (vn < 0) {
        in_nodes_[k].push_back(i);
        prof[i] = mu_standard(v) / smu_[i];  // mu / sqrt(mu_c)
        mass_in += grid.weight() * smu_[i] * prof[i] * std::abs(vn);
      }
    }
    // discrete counterpart of the sqrt(2 pi) wall normalization: the
    // re-emitted incoming flux equals z_{gamma+} exactly
    norm_const_[k] = 1.0 / mass_in;
    emission_[k] = prof * norm_const_[k];
    norm_const_[k] /= sqrt_2pi;  // reported relative to the continuum constant
  }
}

double BoundaryOperator::z_plus(int k, const Eigen::VectorXd& f_face) const {
  double z = 0.0;
  for (int i : out_nodes_[k]) z += smu_[i] * vn_abs_[k][i] * f_face[i];
  return grid_->weight() * z;
}

double BoundaryOperator::z_minus(int k, const Eigen::VectorXd& f_face) const {
  double z = 0.0;
  for (int i : in_nodes_[k]) z += smu_[i] * vn_abs_[k][i] * f_face[i];
  return grid_->weight() * z;
}

Eigen::VectorXd BoundaryOperator::apply_diffuse_reflection(int k,
                                                           const Eigen::VectorXd& f_out) const {
  return emission_[k] * z_plus(k, f_out);
}

Eigen::VectorXd BoundaryOperator::emission_times(int k, double z) const {
  return emission_[k] * z;
}

}  // namespace exkin
