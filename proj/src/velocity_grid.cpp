#include "exkin/velocity_grid.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>

namespace exkin {

double maxwellian(const MaxwellianParams& p, const Vec3& v) {
  if (!(p.rho > 0.0)) throw ConfigError("maxwellian: rho must be > 0");
  if (!(p.T > 0.0)) throw ConfigError("maxwellian: T must be > 0");
  const double two_pi_T = 2.0 * std::numbers::pi * p.T;
  return p.rho * std::pow(two_pi_T, -1.5) * std::exp(-(v - p.u).squaredNorm() / (2.0 * p.T));
}

double mu_standard(const Vec3& v) {
  static const double norm = std::pow(2.0 * std::numbers::pi, -1.5);
  return norm * std::exp(-0.5 * v.squaredNorm());
}

VelocityGrid VelocityGrid::build(double v_max, int n_per_axis) {
  if (!(v_max > 0.0)) throw ConfigError("build_grid: v_max must be > 0");
  if (n_per_axis <= 0 || n_per_axis % 2 != 0)
    throw ConfigError("build_grid: n_per_axis must be a positive even integer");

  VelocityGrid g;
  g.v_max_ = v_max;
  g.n_ = n_per_axis;
  g.h_ = 2.0 * v_max / n_per_axis;
  g.nodes_.reserve(static_cast<std::size_t>(n_per_axis) * n_per_axis * n_per_axis);
  for (int ix = 0; ix < n_per_axis; ++ix)
    for (int iy = 0; iy < n_per_axis; ++iy)
      for (int iz = 0; iz < n_per_axis; ++iz)
        g.nodes_.emplace_back(g.axis_coord(ix), g.axis_coord(iy), g.axis_coord(iz));
  return g;
}

bool VelocityGrid::trilinear(const Vec3& p, std::array<int, 8>& idx,
                             std::array<double, 8>& w) const {
  double frac[3];
  int base[3];
  for (int a = 0; a < 3; ++a) {
    const double t = (p[a] + v_max_) / h_ - 0.5;  // slot coordinate
    const double fl = std::floor(t);
    base[a] = static_cast<int>(fl);
    frac[a] = t - fl;
    if (base[a] < 0 || base[a] >= n_ - 1) return false;
  }
  int m = 0;
  for (int dx = 0; dx <= 1; ++dx)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dz = 0; dz <= 1; ++dz) {
        idx[m] = index(base[0] + dx, base[1] + dy, base[2] + dz);
        w[m] = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
               (dz ? frac[2] : 1.0 - frac[2]);
        ++m;
      }
  return true;
}

Eigen::VectorXd VelocityGrid::sample_mu_c(const DriftContext& d) const {
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) out[i] = d.mu_c(nodes_[i]);
  return out;
}

Eigen::VectorXd VelocityGrid::sample_sqrt_mu_c(const DriftContext& d) const {
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) out[i] = d.sqrt_mu_c(nodes_[i]);
  return out;
}

Eigen::VectorXd VelocityGrid::sample(const std::function<double(const Vec3&)>& f) const {
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) out[i] = f(nodes_[i]);
  return out;
}

std::uint64_t VelocityGrid::hash() const {
  // FNV-1a over the defining parameters
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(n_));
  std::uint64_t bits;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&bits, &v_max_, sizeof(bits));
  mix(bits);
  return h;
}

std::string VelocityGrid::describe() const {
  std::ostringstream os;
  os << "v_max = " << v_max_ << "\nn_per_axis = " << n_ << "\n";
  return os.str();
}

// --------------------------------------------------------------------------

GaussHermite1D::GaussHermite1D(int n) {
  // Golub-Welsch for the weight e^{-x^2/2}/sqrt(2 pi): recurrence
  // x p_k = p_{k+1} + k p_{k-1}  (probabilists' Hermite), Jacobi matrix has
  // zero diagonal and off-diagonal sqrt(k).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x_ = es.eigenvalues();
  w_.resize(n);
  for (int i = 0; i < n; ++i) w_[i] = sqr(es.eigenvectors()(0, i));  // total mass 1
}

double gauss_moment_1d(int k) {
  if (k < 0) throw ConfigError("gauss_moment_1d: negative power");
  if (k % 2 == 1) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 1; j -= 2) m *= j;  // (k-1)!!
  return m;
}

double half_gauss_moment_1d(int k) {
  if (k < 0) throw ConfigError("half_gauss_moment_1d: negative power");
  if (k == 0) return 0.5;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  if (k == 1) return inv_sqrt_2pi;
  return (k - 1) * half_gauss_moment_1d(k - 2);
}

double gaussian_moment(const std::vector<Monomial>& poly, const DriftContext& /*drift*/) {
  // Moments of v_c against mu_c equal the centered standard moments for any
  // drift.  Evaluated by factorized Gauss-Hermite, sized to the max degree.
  int deg = 0;
  for (const auto& m : poly) deg = std::max(deg, m.degree());
  if (deg > 8) throw ConfigError("gaussian_moment: polynomial degree > 8 unsupported");
  static const GaussHermite1D gh(10);
  const auto& x = gh.nodes();
  const auto& w = gh.weights();

  double total = 0.0;
  for (const auto& mono : poly) {
    double axis[3];
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], mono.powers[a]);
      axis[a] = s;
    }
    total += mono.coeff * axis[0] * axis[1] * axis[2];
  }
  return total;
}

double wall_halfspace_moment(const std::vector<Monomial>& poly) {
  // sqrt(2 pi) * prod over axes, with the z-axis carrying the extra |v_z|
  // factor and the half-line restriction.
  int deg = 0;
  for (const auto& m : poly) deg = std::max(deg, m.degree());
  if (deg > 8) throw ConfigError("wall_halfspace_moment: polynomial degree > 8 unsupported");
  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (const auto& mono : poly) {
    const double mx = gauss_moment_1d(mono.powers[0]);
    const double my = gauss_moment_1d(mono.powers[1]);
    const double mz = half_gauss_moment_1d(mono.powers[2] + 1);
    total += mono.coeff * sqrt_2pi * mx * my * mz;
  }
  return total;
}

}  // namespace exkin
