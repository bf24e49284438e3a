#pragma once

#include "exkin/boundary.hpp"
#include "exkin/collision_core.hpp"
#include "exkin/spatial_mesh.hpp"

namespace exkin {

// Navier-Stokes data on the annulus cells.  u is the deviation velocity of
// the stream decomposition U = u + c (u = -c on the obstacle, u -> 0 far
// out); grad_u columns store the 3x3 Jacobian row-major per cell.
struct FluidField {
  Eigen::MatrixXd u;       // 3 x n_cells
  Eigen::MatrixXd grad_u;  // 9 x n_cells, entry (3i+j) = d_j u_i
  Eigen::VectorXd p;       // n_cells
  double div_defect = 0;   // max |div u| over cells
  double bc_defect = 0;    // max |u + c| over first-shell cells

  static FluidField zero(int n_cells);
  // grad_u by centered second-order differences on the structured mesh;
  // div defect measured from the trace of the result
  void fd_gradients(const SpatialMesh& mesh);
  void measure_defects(const SpatialMesh& mesh, const Vec3& c_inf);
};

// f1, f2, phi_eps, the truncated profile Q = f1 + eps(chi f2 + chibar phi),
// and the velocity cutoff chi = 1_{|v| < eps^-m}.
struct ExpansionTerms {
  KineticField f1, f2, phi_eps, Q_profile;
  Eigen::VectorXd chi;  // 0/1 per velocity node
  double m = 0.5;       // cutoff exponent actually used
  double min_profile = 0;  // min over nodes of mu_c + eps sqrt(mu_c) Q
  double f2_pc_residual = 0;

  // velocity-space basis of f2 for fast linear combinations:
  // f2 = sum_ij S_ij * Mgrad_ij + sum_ij u_i u_j * Gquad_ij
  Eigen::MatrixXd Mgrad;  // n_v x 6 (11,22,33,12,13,23), contracts with sym grad
  Eigen::MatrixXd Gquad;  // n_v x 6

  // low-rank surrogate Q ~ q_basis * q_coeffs used to precompute the
  // linearized collision maps of the positivity iteration; the chibar phi_eps
  // slice is approximated to O(eps) by its quadratic-in-u form and the
  // reconstruction error is recorded
  Eigen::MatrixXd q_basis;   // n_v x 22
  Eigen::MatrixXd q_coeffs;  // 22 x n_cells
  double q_basis_err = 0;    // max |Q - surrogate| / max |Q|
};

// f1(x,v) = sqrt(mu_c) u(x) . v_c
KineticField build_f1(const FluidField& fluid, const DriftContext& drift,
                      const VelocityGrid& grid);

// relative size of P_c(v . grad f1); the divergence defect of u bounds it
double f1_projection_residual(const FluidField& fluid, const KineticField& f1,
                              const SpatialMesh& mesh, const LinearizedOperator& op);

// f2 = L_c^{-1}[ -(I-P_c)(v . grad f1) + Gamma_c(f1,f1) ]
KineticField build_f2(const FluidField& fluid, const LinearizedOperator& op,
                      ExpansionTerms* basis_out = nullptr);

// phi_eps = eps^-2 mu_c^{-1/2} [ M_{1,eps(c+u),1} - mu_c - eps sqrt(mu_c) f1 ]
KineticField build_phi_eps(const FluidField& fluid, const DriftContext& drift,
                           const VelocityGrid& grid);

// assembles all expansion terms; m starts at m0 and grows by 0.25 until the
// truncated profile mu_c + eps sqrt(mu_c) Q is nonnegative on the lattice
ExpansionTerms build_expansion(const FluidField& fluid, const LinearizedOperator& op,
                               double m0 = 0.5);

struct SourceTerms {
  KineticField A_c;     // -(I-P)[v.grad f2] + 2 GammaTilde(f1,f2) + eps Gamma(f2,f2)
  KineticField Abar_c;  // truncated-source variant, assembled split by P_c parts
  double pc_Ac_norm = 0;       // ||P_c A_c||_2 (should be ~ 0)
  double pc_Abar_rel = 0;      // ||P_c Abar_c||_2 / ||Abar_c||_2
};

SourceTerms build_sources(const ExpansionTerms& terms, const FluidField& fluid,
                          const LinearizedOperator& op, const SpatialMesh& mesh,
                          const GammaOptions& gopts = {});

struct BoundaryR {
  BoundaryData r;        // per wall face, incoming half
  double max_zminus = 0; // max |z_{gamma-}(r)| over faces
  double norm_2m = 0;    // |r|_{2,-}
  double norm_inf = 0;
};

// r = P_gamma^c [h] - h on gamma_- with h = f2 - phi_eps (chi_cut applies the
// truncated variant rbar of the positivity scheme)
BoundaryR build_boundary_r(const ExpansionTerms& terms, const BoundaryOperator& bop,
                           bool chi_cut);

}  // namespace exkin
