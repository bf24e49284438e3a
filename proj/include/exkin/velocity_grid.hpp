#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "exkin/common.hpp"

namespace exkin {

struct MaxwellianParams {
  double rho = 1.0;
  Vec3 u = Vec3::Zero();
  double T = 1.0;
};

// M_{rho,u,T}(v) = rho (2 pi T)^{-3/2} exp[-|v-u|^2 / (2T)]
double maxwellian(const MaxwellianParams& p, const Vec3& v);

// standard Maxwellian mu = M_{1,0,1}
double mu_standard(const Vec3& v);

// Drifted frame: v_c = v - eps*c_inf, mu_c(v) = mu(v_c).
struct DriftContext {
  double eps = 0.1;
  Vec3 c_inf = Vec3::Zero();

  DriftContext() = default;
  DriftContext(double eps_, const Vec3& c) : eps(eps_), c_inf(c) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("DriftContext: eps must be in (0,1]");
    if (!(c.norm() < 1.0)) throw ConfigError("DriftContext: |c_inf| must be < 1");
  }

  Vec3 shift() const { return eps * c_inf; }
  Vec3 v_c(const Vec3& v) const { return v - shift(); }
  double mu_c(const Vec3& v) const { return mu_standard(v_c(v)); }
  double sqrt_mu_c(const Vec3& v) const { return std::sqrt(mu_c(v)); }
};

// w(v) = <v>^{beta'} exp(beta |v|^2), beta < 1/4
class WeightFunction {
 public:
  WeightFunction(double beta, double beta_prime) : beta_(beta), beta_prime_(beta_prime) {
    if (!(beta >= 0.0 && beta < 0.25)) throw ConfigError("WeightFunction: need 0 <= beta < 1/4");
    if (!(beta_prime >= 0.0)) throw ConfigError("WeightFunction: need beta' >= 0");
  }
  double operator()(const Vec3& v) const {
    return std::pow(vbracket(v), beta_prime_) * std::exp(beta_ * v.squaredNorm());
  }
  double beta() const { return beta_; }
  double beta_prime() const { return beta_prime_; }

 private:
  double beta_, beta_prime_;
};

// Uniform Cartesian velocity lattice on [-v_max, v_max]^3 with an even node
// count per axis.  Nodes sit at cell centers, so the set is closed under
// v -> -v and never contains v = 0.  All quadrature weights equal h^3.
class VelocityGrid {
 public:
  static VelocityGrid build(double v_max, int n_per_axis);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const Vec3& node(int i) const { return nodes_[i]; }
  double weight() const { return h_ * h_ * h_; }  // same for every node
  double spacing() const { return h_; }
  double cutoff() const { return v_max_; }
  int n_per_axis() const { return n_; }

  int index(int ix, int iy, int iz) const { return (ix * n_ + iy) * n_ + iz; }

  // 1D axis coordinate of slot i
  double axis_coord(int i) const { return -v_max_ + h_ * (i + 0.5); }

  // Trilinear interpolation stencil at point p.  Returns false when p falls
  // outside the lattice hull (callers treat that as a zero contribution).
  bool trilinear(const Vec3& p, std::array<int, 8>& idx, std::array<double, 8>& w) const;

  // Discrete integral sum_i w f_i
  double integrate(const Eigen::VectorXd& f) const { return weight() * f.sum(); }

  // mu_c sampled at the nodes, and its square root
  Eigen::VectorXd sample_mu_c(const DriftContext& d) const;
  Eigen::VectorXd sample_sqrt_mu_c(const DriftContext& d) const;
  Eigen::VectorXd sample(const std::function<double(const Vec3&)>& f) const;

  // key for operator cache files
  std::uint64_t hash() const;

  std::string describe() const;

 private:
  VelocityGrid() = default;
  double v_max_ = 0, h_ = 0;
  int n_ = 0;
  std::vector<Vec3> nodes_;
};

// ---------------------------------------------------------------------------
// Gaussian-moment oracle.  Factorized 1D Gauss-Hermite quadrature against the
// weight e^{-x^2/2}/sqrt(2 pi); exact for polynomials up to the rule degree.
// Entirely independent of the discrete lattice.
// ---------------------------------------------------------------------------

class GaussHermite1D {
 public:
  explicit GaussHermite1D(int n);  // exact for degree <= 2n-1
  const Eigen::VectorXd& nodes() const { return x_; }
  const Eigen::VectorXd& weights() const { return w_; }

 private:
  Eigen::VectorXd x_, w_;
};

// One monomial coeff * v_c,x^a v_c,y^b v_c,z^c of a polynomial in v_c.
struct Monomial {
  double coeff = 1.0;
  std::array<int, 3> powers{0, 0, 0};
  int degree() const { return powers[0] + powers[1] + powers[2]; }
};

// integral of poly(v_c) mu_c(v) dv over R^3 (drift-independent by translation;
// the context is accepted to mirror the call sites).  Degree must be <= 8.
double gaussian_moment(const std::vector<Monomial>& poly, const DriftContext& drift);

// integral over the half-space {v_z > 0} of poly(v) * M^w(v) * v_z dv with
// M^w = sqrt(2 pi) mu the wall Maxwellian.  Analytic 1D half-line Gaussian
// moments along z, Gauss-Hermite across.  poly powers apply to plain v.
double wall_halfspace_moment(const std::vector<Monomial>& poly);

// 1D helpers: E[x^k] for x ~ N(0,1), and H_k = int_0^inf x^k e^{-x^2/2} dx / sqrt(2 pi)
double gauss_moment_1d(int k);
double half_gauss_moment_1d(int k);

}  // namespace exkin
