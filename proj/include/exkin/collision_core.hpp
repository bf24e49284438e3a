#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "exkin/velocity_grid.hpp"

namespace exkin {

// Hard-sphere cross section B(omega, V) = |omega . V| (theta = 1).  The
// exponent is kept as data so soft cutoff potentials can reuse the type, but
// only theta = 1 has the closed-form nu cross-check.
struct CollisionKernel {
  double theta = 1.0;
  int angular_nodes = 26;  // Lebedev rule size, 26 or 50
};

// Lebedev quadrature on S^2; weights sum to 4 pi.
struct SphereRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  static SphereRule lebedev(int n);  // n in {26, 50}
};

// truncation radii for the direct (v*, omega) quadrature; infinity = exact
// lattice loops.  vout_cut limits which output nodes are evaluated, vstar_cut
// limits the v* sum (post-collision energies carry e^{-|v*|^2/4}).
struct GammaOptions {
  double vstar_cut = std::numeric_limits<double>::infinity();
  double vout_cut = std::numeric_limits<double>::infinity();
};

// Q(F,G) = Q+ - Q-, hard spheres, direct quadrature with trilinear
// interpolation of the post-collision values.
Eigen::VectorXd q_bilinear(const Eigen::VectorXd& F, const Eigen::VectorXd& G,
                           const CollisionKernel& kernel, const VelocityGrid& grid,
                           const GammaOptions& opts = {});

// closed-form hard-sphere collision frequency nu(|v|) for mu = M_{1,0,1}
double nu_hard_sphere(double speed);

struct HydroCoeffs {
  double a = 0;
  Vec3 b = Vec3::Zero();
  double c = 0;
};

// Orthogonal projector onto span{sqrt(mu_c), v_c sqrt(mu_c), |v_c|^2 sqrt(mu_c)}
// on the discrete lattice.
class HydroProjector {
 public:
  HydroProjector(const VelocityGrid& grid, const DriftContext& drift);

  const Eigen::MatrixXd& orthonormal_basis() const { return onb_; }  // n x 5
  // natural-basis coefficient extraction: f ≈ [a + b.v_c + c(|v_c|^2-3)/2] sqrt(mu_c)
  HydroCoeffs coefficients(const Eigen::VectorXd& f) const;
  Eigen::VectorXd reconstruct(const HydroCoeffs& h) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;        // P_c f
  Eigen::VectorXd complement(const Eigen::VectorXd& f) const;   // (I - P_c) f
  // natural basis columns [sqrt, v_c1 sqrt, v_c2 sqrt, v_c3 sqrt, (|v_c|^2-3)/2 sqrt]
  const Eigen::MatrixXd& natural_basis() const { return nat_; }
  double weight() const { return w_; }

 private:
  Eigen::MatrixXd nat_;  // n x 5
  Eigen::MatrixXd onb_;  // n x 5, orthonormal w.r.t. w * dot
  double w_;
};

// L_c = nu - K assembled on the lattice from the closed-form hard-sphere
// kernels k1, k2 (drifted by translation), then cleaned up:
//   * the weighted matrix is symmetrized (defect recorded),
//   * the five discrete collision invariants are projected out exactly so
//     Null L_c is span{psi_alpha} to machine precision.
class LinearizedOperator {
 public:
  const VelocityGrid& grid() const { return *grid_; }
  const DriftContext& drift() const { return drift_; }
  const CollisionKernel& kernel() const { return kernel_; }
  const HydroProjector& projector() const { return *proj_; }

  const Eigen::VectorXd& nu() const { return nu_; }
  const Eigen::MatrixXd& K() const { return K_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;    // L_c f
  Eigen::VectorXd apply_K(const Eigen::VectorXd& f) const;  // K f
  // batched over columns (velocity x cells layout)
  Eigen::MatrixXd apply_K(const Eigen::MatrixXd& F) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& F) const;

  double symmetry_defect() const { return sym_defect_; }
  double null_defect_pre() const { return null_defect_pre_; }   // before cleanup
  double null_defect_post() const { return null_defect_post_; }

  // restricted symmetric solve on the complement of Null L_c
  Eigen::VectorXd solve_linv(const Eigen::VectorXd& rhs, double tol_proj = 1e-12) const;

  // <f, L_c g> with the lattice weight
  double dirichlet(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

  friend LinearizedOperator build_linearized(const DriftContext&, const CollisionKernel&,
                                             const VelocityGrid&, const std::string&);

 private:
  const VelocityGrid* grid_ = nullptr;
  DriftContext drift_;
  CollisionKernel kernel_;
  std::shared_ptr<HydroProjector> proj_;
  Eigen::VectorXd nu_;
  Eigen::MatrixXd K_;  // includes lattice weight: (K f)_i = sum_j K_(i,j) f_j
  double sym_defect_ = 0, null_defect_pre_ = 0, null_defect_post_ = 0;
  mutable std::shared_ptr<Eigen::LDLT<Eigen::MatrixXd>> linv_;  // shifted factor, lazy
  void ensure_factorization() const;
};

// Assembles (or reloads from the binary cache file, when the key matches)
// the linearized operator for one (grid, drift, kernel) triple.
LinearizedOperator build_linearized(const DriftContext& drift, const CollisionKernel& kernel,
                                    const VelocityGrid& grid,
                                    const std::string& cache_path = "");

// Gamma_c(f,g) = mu_c^{-1/2} Q(mu_c^{1/2} f, mu_c^{1/2} g)
Eigen::VectorXd gamma_bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                               const DriftContext& drift, const CollisionKernel& kernel,
                               const VelocityGrid& grid, const GammaOptions& opts = {});

// symmetrized form 0.5 [Gamma(f,g) + Gamma(g,f)]
Eigen::VectorXd gamma_tilde(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                            const DriftContext& drift, const CollisionKernel& kernel,
                            const VelocityGrid& grid, const GammaOptions& opts = {});

// Precomputed linear operator X -> 2 GammaTilde(h, X) for fixed h, stored as a
// dense (possibly row-truncated) matrix.  Used for L_c^{(1)} inside the
// positivity iteration.
class GammaLinearOperator {
 public:
  GammaLinearOperator(const Eigen::VectorXd& h, const DriftContext& drift,
                      const CollisionKernel& kernel, const VelocityGrid& grid,
                      const GammaOptions& opts);
  // maps full-length velocity vectors; rows beyond vout_cut give zero
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;

 private:
  Eigen::MatrixXd A_;             // nrows x n
  std::vector<int> row_of_node_;  // -1 when truncated away
  std::vector<int> node_of_row_;
  int n_ = 0;
};

// smallest Rayleigh quotient <f, L f> / ||f||_nu^2 over f orthogonal to the
// null space, by shift-inverted inverse iteration
double spectral_gap(const LinearizedOperator& op);

// least-squares exponent of nu(v) ~ |v|^theta over speeds in [lo, hi]
double nu_exponent_fit(const LinearizedOperator& op, double lo = 3.0, double hi = 6.0);

struct TransportCoefficients {
  double viscosity = 0;       // v: average of <B_ij, L^{-1} B_ij>, i < j
  double heat_conductivity = 0;  // kappa: (1/3) sum_i <A_i, L^{-1} A_i>
  Eigen::MatrixXd B;          // n x 6 columns: L^{-1}(I-P)[v_ci v_cj sqrt(mu_c)], ij in {11,22,33,12,13,23}
  Eigen::MatrixXd A;          // n x 3 columns: L^{-1}[(1/2) v_ci (|v_c|^2-5) sqrt(mu_c)]
};

TransportCoefficients compute_transport(const LinearizedOperator& op);

}  // namespace exkin
