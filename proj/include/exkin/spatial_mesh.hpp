#pragma once

#include <vector>

#include "exkin/velocity_grid.hpp"

namespace exkin {

// Structured spherical annulus between the unit-sphere obstacle and an outer
// radius: nr geometric radial shells x ntheta equal-cos(theta) bands x nphi
// sectors.  Face normals are evaluated at face centroids; first-order upwind
// transport treats the faces as flat.
class SpatialMesh {
 public:
  enum class FaceType { interior, wall, far_field };

  struct Face {
    int cell_in = -1;   // cell the normal points out of
    int cell_out = -1;  // neighbour (-1 for boundary faces)
    Vec3 normal = Vec3::Zero();  // unit, outward from cell_in
    Vec3 center = Vec3::Zero();
    double area = 0;
    FaceType type = FaceType::interior;
  };

  static SpatialMesh annulus(int nr, int ntheta, int nphi, double r_inner = 1.0,
                             double r_far = 8.0);

  int n_cells() const { return static_cast<int>(centers_.size()); }
  const Vec3& center(int c) const { return centers_[c]; }
  double volume(int c) const { return volumes_[c]; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<int>& wall_faces() const { return wall_faces_; }
  const std::vector<int>& far_faces() const { return far_faces_; }
  const std::vector<std::vector<int>>& cell_faces() const { return cell_faces_; }

  int nr() const { return nr_; }
  int ntheta() const { return nth_; }
  int nphi() const { return nph_; }
  double r_inner() const { return r_inner_; }
  double r_far() const { return r_far_; }
  int cell_index(int ir, int it, int ip) const { return (ir * nth_ + it) * nph_ + ip; }
  void cell_coords(int c, int& ir, int& it, int& ip) const;

  double total_volume() const;
  // shell-averaged quantity; used for far-field decay diagnostics
  std::vector<double> shell_radii() const { return shell_r_; }

  // second-order centered differences of a cell field in the structured
  // directions, mapped to Cartesian gradient per cell (3 x n_cells)
  Eigen::MatrixXd gradient(const Eigen::VectorXd& field) const;

  std::uint64_t hash() const;

 private:
  int nr_ = 0, nth_ = 0, nph_ = 0;
  double r_inner_ = 1, r_far_ = 8;
  std::vector<double> r_edges_, costh_edges_, phi_edges_;
  std::vector<double> shell_r_;
  std::vector<Vec3> centers_;
  std::vector<double> volumes_;
  std::vector<Face> faces_;
  std::vector<int> wall_faces_, far_faces_;
  std::vector<std::vector<int>> cell_faces_;
};

// Scalar field over (spatial cell x velocity node): column c holds the
// velocity distribution in cell c.
struct KineticField {
  Eigen::MatrixXd vals;  // n_v x n_cells

  KineticField() = default;
  KineticField(int n_v, int n_cells) { vals = Eigen::MatrixXd::Zero(n_v, n_cells); }
  int n_v() const { return static_cast<int>(vals.rows()); }
  int n_cells() const { return static_cast<int>(vals.cols()); }
  double* data() { return vals.data(); }
  const double* data() const { return vals.data(); }
};

// boundary trace data: one velocity vector per wall face (gamma_- content is
// the v.n < 0 half-space on each face)
struct BoundaryData {
  Eigen::MatrixXd vals;  // n_v x n_wall_faces
  BoundaryData() = default;
  BoundaryData(int n_v, int n_faces) { vals = Eigen::MatrixXd::Zero(n_v, n_faces); }
};

}  // namespace exkin
