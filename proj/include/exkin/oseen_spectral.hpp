#pragma once

#include <array>
#include <complex>

#include "exkin/collision_core.hpp"
#include "exkin/diagnostics.hpp"
#include "exkin/spatial_mesh.hpp"

namespace exkin {

using cplx = std::complex<double>;

// Periodic Fourier lattice: n^3 modes of a box with side L, wavevectors
// (2 pi / L) * m for integer m in [-n/2, n/2).
class KGrid {
 public:
  KGrid(double L, int n);
  double L() const { return L_; }
  int n() const { return n_; }
  int n_modes() const { return n_ * n_ * n_; }
  Vec3 wavevector(int idx) const;
  int index(int mx, int my, int mz) const;  // integer mode coords (signed)
  bool is_zero_mode(int idx) const { return idx == zero_idx_; }
  int zero_mode() const { return zero_idx_; }

  // smooth small-k cutoff: 1 for |k|<1, 0 for |k|>2, quintic C^2 blend
  static double jcut(double kmag);
  static double jcut_c(double kmag) { return 1.0 - jcut(kmag); }

 private:
  double L_ = 0;
  int n_ = 0, zero_idx_ = 0;
};

// state of the macroscopic Fourier system: scalars a,c,P, vector b, and the
// sources (s0, s_under, s4) per mode
struct SpectralState {
  Eigen::VectorXcd a, c, P, s0, s4;
  Eigen::MatrixXcd b, s_under;  // 3 x n_modes
  explicit SpectralState(int n_modes = 0) { resize(n_modes); }
  void resize(int n_modes) {
    a.setZero(n_modes);
    c.setZero(n_modes);
    P.setZero(n_modes);
    s0.setZero(n_modes);
    s4.setZero(n_modes);
    b.setZero(3, n_modes);
    s_under.setZero(3, n_modes);
  }
  int n_modes() const { return static_cast<int>(a.size()); }
};

// N_{sigma,beta}(k) = eps [ sigma |k|^2 + beta i c.k ]
struct MultiplierSpec {
  double sigma = 1.0;
  double beta = 1.0;
  double eps = 0.1;
  Vec3 c_inf = Vec3::Zero();
  cplx N(const Vec3& k) const {
    return eps * cplx(sigma * k.squaredNorm(), beta * eps_free_ck(k));
  }
  double eps_free_ck(const Vec3& k) const { return c_inf.dot(k); }
};

// Closed-form per-mode resolution of the balance-law system
//   i k.b + i eps k.c_inf a           = s0
//   i k P + eps[v|k|^2 + i c.k] b     = s_under
//   i k.b + eps[kappa|k|^2 + 1.5 i c.k] c = s4
// with P = a + c.  The k = 0 mode is zeroed and flagged in the result.
struct MacroscopicSolution {
  SpectralState state;
  double max_residual = 0;   // per-mode relative residual of the balance laws
  double min_prefactor = 1;  // smallest |1 - eps N c.k / (i|k|^2)| encountered
  bool zero_mode_flagged = false;
};

MacroscopicSolution solve_macroscopic(const SpectralState& sources, double viscosity,
                                      double kappa, const MultiplierSpec& spec,
                                      const KGrid& kgrid);

// independent dense 5x5-per-mode oracle of the same system
SpectralState solve_macroscopic_dense(const SpectralState& sources, double viscosity,
                                      double kappa, const MultiplierSpec& spec,
                                      const KGrid& kgrid);

// residual of the three balance laws for a candidate solution
double balance_residual(const SpectralState& st, const SpectralState& sources,
                        double viscosity, double kappa, const MultiplierSpec& spec,
                        const KGrid& kgrid);

// || eps j |k|^ell N^{-1} ||_q by lattice quadrature over 0 < |k| <= 2
double multiplier_norm_scan(const MultiplierSpec& spec, double q, int ell,
                            const KGrid& kgrid);

// Leray projector applied per mode
Eigen::Vector3cd leray_project(const Vec3& k, const Eigen::Vector3cd& w);

// ---------------------------------------------------------------------------
// source splitting S1..S5 for a cutoff kinetic field
// ---------------------------------------------------------------------------

// periodic box sampling of a kinetic field for the splitting diagnostics.
// fzeta holds zeta*f on a uniform n^3 spatial grid, flattened x-major.
struct BoxKineticField {
  Eigen::MatrixXd vals;  // n_v x n^3
  double L = 0;
  int n = 0;
};

struct SplitSources {
  std::array<SpectralState, 5> s;
  double sum_defect = 0;  // relative | sum s_i - s_total |
};

// splits the sources of the Fourier system for f^zeta per the large-k /
// C_s / C_r / g / P_c g decomposition.  C enters as C = f v.grad zeta with
// grad zeta supplied on the box grid.
SplitSources split_sources(const BoxKineticField& f_zeta, const BoxKineticField& ffield,
                           const BoxKineticField& g, const Eigen::MatrixXd& grad_zeta,
                           const Eigen::VectorXd& zeta, const LinearizedOperator& op,
                           const TransportCoefficients& tc, const KGrid& kgrid);

// C_r(k,v)-moment machinery: 16-point Gauss-Legendre lambda quadrature of the
// k-gradient transform; returns the vector-valued moment against a velocity
// weight for one mode
Eigen::Vector3cd cshat_r_moment(const BoxKineticField& cfield, const Eigen::VectorXd& vweight,
                                const Vec3& k, const VelocityGrid& grid, int n_lambda = 16);

// sup over modes (|k| <= 2) and velocity nodes of |C_r| estimated with the
// lambda quadrature (Lemma-5.5 style diagnostic)
double cshat_r_sup(const BoxKineticField& cfield, const VelocityGrid& grid,
                   const KGrid& kgrid, int n_lambda = 16);

// Q_alpha flux functionals on the obstacle boundary:
//   Q_alpha = -int_{dOmega} int f v.n psi_alpha + int_{shell} (1-zeta) int psi_alpha P_c g
// psi_0..4 = [sqrt(mu_c), v_c sqrt(mu_c), (|v_c|^2-3)/sqrt(6) sqrt(mu_c)]
// The zeta cutoff rises from 0 at the wall to 1 at distance 1.
std::array<double, 5> flux_functionals(const KineticField& f, const KineticField& g,
                                       const LinearizedOperator& op, const SpatialMesh& mesh,
                                       const BoundaryOperator& bop);

// same flux integral on the outer boundary of radial shell `shell_idx`
// (surface S_xi of the two-surface consistency check)
std::array<double, 5> flux_on_shell(const KineticField& f, const LinearizedOperator& op,
                                    const SpatialMesh& mesh, int shell_idx);

}  // namespace exkin
