#include "exkin/collision_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace exkin {

namespace {
constexpr double kPi = std::numbers::pi;

// expand a generator (a,b,c) into all sign/permutation images
void push_octahedral(std::vector<Vec3>& pts, std::vector<double>& ws, double a, double b,
                     double c, double w) {
  std::vector<Vec3> seen;
  double p[3] = {a, b, c};
  int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (auto& pr : perm)
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2)
        for (int sz = -1; sz <= 1; sz += 2) {
          Vec3 q(sx * p[pr[0]], sy * p[pr[1]], sz * p[pr[2]]);
          bool dup = false;
          for (const auto& s : seen)
            if ((s - q).norm() < 1e-12) {
              dup = true;
              break;
            }
          if (!dup) {
            seen.push_back(q);
            pts.push_back(q);
            ws.push_back(w);
          }
        }
}

const SphereRule& sphere_rule(int angular_nodes) {
  static const SphereRule r26 = SphereRule::lebedev(26);
  static const SphereRule r50 = SphereRule::lebedev(50);
  return angular_nodes >= 50 ? r50 : r26;
}
}  // namespace

SphereRule SphereRule::lebedev(int n) {
  SphereRule r;
  const double four_pi = 4.0 * kPi;
  if (n == 26) {
    push_octahedral(r.nodes, r.weights, 1, 0, 0, four_pi / 21.0);
    const double s = 1.0 / std::sqrt(2.0);
    push_octahedral(r.nodes, r.weights, s, s, 0, four_pi * 4.0 / 105.0);
    const double t = 1.0 / std::sqrt(3.0);
    push_octahedral(r.nodes, r.weights, t, t, t, four_pi * 27.0 / 840.0);
  } else if (n == 50) {
    push_octahedral(r.nodes, r.weights, 1, 0, 0, four_pi * 0.0126984126984127);
    const double s = 1.0 / std::sqrt(2.0);
    push_octahedral(r.nodes, r.weights, s, s, 0, four_pi * 0.02257495590828924);
    const double t = 1.0 / std::sqrt(3.0);
    push_octahedral(r.nodes, r.weights, t, t, t, four_pi * 0.02109375);
    const double l = 1.0 / std::sqrt(11.0);
    const double m = 3.0 / std::sqrt(11.0);
    push_octahedral(r.nodes, r.weights, l, l, m, four_pi * 0.02017333553791887);
  } else {
    throw ConfigError("SphereRule::lebedev: only 26 and 50 node rules are provided");
  }
  return r;
}

double nu_hard_sphere(double c) {
  if (c < 1e-8) return 2.0 * kPi * 2.0 * std::sqrt(2.0 / kPi);
  const double e = std::exp(-0.5 * c * c);
  return 2.0 * kPi *
         (std::sqrt(2.0 / kPi) * e + (c + 1.0 / c) * std::erf(c / std::sqrt(2.0)));
}

// ---------------------------------------------------------------------------
// direct bilinear collision quadrature
// ---------------------------------------------------------------------------

Eigen::VectorXd q_bilinear(const Eigen::VectorXd& F, const Eigen::VectorXd& G,
                           const CollisionKernel& kernel, const VelocityGrid& grid,
                           const GammaOptions& opts) {
  if (F.size() != grid.size() || G.size() != grid.size())
    throw ConfigError("q_bilinear: field size mismatch");
  if (kernel.theta != 1.0)
    throw ConfigError("q_bilinear: only the hard-sphere kernel (theta = 1) is implemented");
  const SphereRule& rule = sphere_rule(kernel.angular_nodes);

  const int n = grid.size();
  const double wq = grid.weight();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double vout2 = sqr(opts.vout_cut);
  const double vstar2 = sqr(opts.vstar_cut);

  std::array<int, 8> sid;
  std::array<double, 8> sw;
  for (int i = 0; i < n; ++i) {
    const Vec3& v = grid.node(i);
    if (v.squaredNorm() > vout2) continue;
    double acc = 0.0;
    double loss_ker = 0.0;
    for (int j = 0; j < n; ++j) {
      const Vec3& vs = grid.node(j);
      if (vs.squaredNorm() > vstar2) continue;
      const Vec3 V = v - vs;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const Vec3& om = rule.nodes[k];
        const double proj = om.dot(V);
        const double B = std::abs(proj) * rule.weights[k];
        loss_ker += B * G[j];
        const Vec3 vp = v - proj * om;
        const Vec3 vsp = vs + proj * om;
        double fp = 0.0, gp = 0.0;
        if (grid.trilinear(vp, sid, sw))
          for (int m = 0; m < 8; ++m) fp += sw[m] * F[sid[m]];
        if (fp != 0.0 && grid.trilinear(vsp, sid, sw))
          for (int m = 0; m < 8; ++m) gp += sw[m] * G[sid[m]];
        acc += B * fp * gp;
      }
    }
    out[i] = wq * (acc - F[i] * loss_ker);
  }
  return out;
}

Eigen::VectorXd gamma_bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                               const DriftContext& drift, const CollisionKernel& kernel,
                               const VelocityGrid& grid, const GammaOptions& opts) {
  if (f.size() != grid.size() || g.size() != grid.size())
    throw ConfigError("gamma_bilinear: field size mismatch");
  const SphereRule& rule = sphere_rule(kernel.angular_nodes);

  const int n = grid.size();
  const double wq = grid.weight();
  const Eigen::VectorXd smu = grid.sample_sqrt_mu_c(drift);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double vout2 = sqr(opts.vout_cut);
  const double vstar2 = sqr(opts.vstar_cut);

  // Elastic collisions conserve |v|^2 + |v*|^2 and v + v*, so
  // mu_c^{1/2}(v') mu_c^{1/2}(v*') = mu_c^{1/2}(v) mu_c^{1/2}(v*) exactly and
  // the gain prefactor reduces to on-lattice values.
  std::array<int, 8> sid;
  std::array<double, 8> sw;
  for (int i = 0; i < n; ++i) {
    const Vec3& v = grid.node(i);
    if (v.squaredNorm() > vout2) continue;
    double gain = 0.0, loss_ker = 0.0;
    for (int j = 0; j < n; ++j) {
      const Vec3& vs = grid.node(j);
      if (vs.squaredNorm() > vstar2) continue;
      const Vec3 V = v - vs;
      const double smu_j = smu[j];
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const Vec3& om = rule.nodes[k];
        const double proj = om.dot(V);
        const double Bs = std::abs(proj) * rule.weights[k] * smu_j;
        loss_ker += Bs * g[j];
        const Vec3 vp = v - proj * om;
        const Vec3 vsp = vs + proj * om;
        double fp = 0.0, gp = 0.0;
        if (grid.trilinear(vp, sid, sw))
          for (int m = 0; m < 8; ++m) fp += sw[m] * f[sid[m]];
        if (fp != 0.0 && grid.trilinear(vsp, sid, sw))
          for (int m = 0; m < 8; ++m) gp += sw[m] * g[sid[m]];
        gain += Bs * fp * gp;
      }
    }
    out[i] = wq * (gain - f[i] * loss_ker);
  }
  return out;
}

Eigen::VectorXd gamma_tilde(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                            const DriftContext& drift, const CollisionKernel& kernel,
                            const VelocityGrid& grid, const GammaOptions& opts) {
  return 0.5 * (gamma_bilinear(f, g, drift, kernel, grid, opts) +
                gamma_bilinear(g, f, drift, kernel, grid, opts));
}

GammaLinearOperator::GammaLinearOperator(const Eigen::VectorXd& h, const DriftContext& drift,
                                         const CollisionKernel& kernel, const VelocityGrid& grid,
                                         const GammaOptions& opts) {
  const SphereRule& rule = sphere_rule(kernel.angular_nodes);
  n_ = grid.size();
  const double wq = grid.weight();
  const Eigen::VectorXd smu = grid.sample_sqrt_mu_c(drift);
  const double vout2 = sqr(opts.vout_cut);
  const double vstar2 = sqr(opts.vstar_cut);

  row_of_node_.assign(n_, -1);
  for (int i = 0; i < n_; ++i)
    if (grid.node(i).squaredNorm() <= vout2) {
      row_of_node_[i] = static_cast<int>(node_of_row_.size());
      node_of_row_.push_back(i);
    }
  const int nrows = static_cast<int>(node_of_row_.size());
  A_ = Eigen::MatrixXd::Zero(nrows, n_);

  // matrix of X -> Gamma(h, X) + Gamma(X, h):
  //   gain: B smu(v*) [h(v') X(v*') + X(v') h(v*')]   (on-lattice prefactor)
  //   loss: B smu(v*) [h(v) X(v*) + X(v) h(v*)]
  std::array<int, 8> sid, sid2;
  std::array<double, 8> sw, sw2;
  for (int rr = 0; rr < nrows; ++rr) {
    const int i = node_of_row_[rr];
    const Vec3& v = grid.node(i);
    auto row = A_.row(rr);
    double diag_loss = 0.0;
    for (int j = 0; j < n_; ++j) {
      const Vec3& vs = grid.node(j);
      if (vs.squaredNorm() > vstar2) continue;
      const Vec3 V = v - vs;
      const double smu_j = smu[j];
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const Vec3& om = rule.nodes[k];
        const double proj = om.dot(V);
        const double Bs = std::abs(proj) * rule.weights[k] * smu_j;
        row[j] -= Bs * h[i];
        diag_loss += Bs * h[j];
        const Vec3 vp = v - proj * om;
        const Vec3 vsp = vs + proj * om;
        if (!grid.trilinear(vp, sid, sw) || !grid.trilinear(vsp, sid2, sw2)) continue;
        double hp = 0.0, hsp = 0.0;
        for (int m = 0; m < 8; ++m) hp += sw[m] * h[sid[m]];
        for (int m = 0; m < 8; ++m) hsp += sw2[m] * h[sid2[m]];
        for (int m = 0; m < 8; ++m) row[sid2[m]] += Bs * hp * sw2[m];
        for (int m = 0; m < 8; ++m) row[sid[m]] += Bs * hsp * sw[m];
      }
    }
    row[i] -= diag_loss;
    row *= wq;
  }
}

Eigen::VectorXd GammaLinearOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd compact = A_ * x;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (std::size_t r = 0; r < node_of_row_.size(); ++r) out[node_of_row_[r]] = compact[r];
  return out;
}

Eigen::MatrixXd GammaLinearOperator::apply(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd compact = A_ * X;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, X.cols());
  for (std::size_t r = 0; r < node_of_row_.size(); ++r) out.row(node_of_row_[r]) = compact.row(r);
  return out;
}

// ---------------------------------------------------------------------------
// hydro projector
// ---------------------------------------------------------------------------

HydroProjector::HydroProjector(const VelocityGrid& grid, const DriftContext& drift) {
  const int n = grid.size();
  w_ = grid.weight();
  nat_.resize(n, 5);
  for (int i = 0; i < n; ++i) {
    const Vec3 vc = drift.v_c(grid.node(i));
    const double s = drift.sqrt_mu_c(grid.node(i));
    nat_(i, 0) = s;
    nat_(i, 1) = vc[0] * s;
    nat_(i, 2) = vc[1] * s;
    nat_(i, 3) = vc[2] * s;
    nat_(i, 4) = 0.5 * (vc.squaredNorm() - 3.0) * s;
  }
  onb_ = nat_;
  for (int c = 0; c < 5; ++c) {
    for (int rep = 0; rep < 2; ++rep)  // twice for orthogonality to machine precision
      for (int p = 0; p < c; ++p)
        onb_.col(c) -= (w_ * onb_.col(p).dot(onb_.col(c))) * onb_.col(p);
    onb_.col(c) /= std::sqrt(w_ * onb_.col(c).squaredNorm());
  }
}

HydroCoeffs HydroProjector::coefficients(const Eigen::VectorXd& f) const {
  Eigen::Matrix<double, 5, 5> G = w_ * (nat_.transpose() * nat_);
  Eigen::Matrix<double, 5, 1> rhs = w_ * (nat_.transpose() * f);
  Eigen::Matrix<double, 5, 1> x = G.ldlt().solve(rhs);
  HydroCoeffs h;
  h.a = x[0];
  h.b = Vec3(x[1], x[2], x[3]);
  h.c = x[4];
  return h;
}

Eigen::VectorXd HydroProjector::reconstruct(const HydroCoeffs& h) const {
  Eigen::Matrix<double, 5, 1> x;
  x << h.a, h.b[0], h.b[1], h.b[2], h.c;
  return nat_ * x;
}

Eigen::VectorXd HydroProjector::apply(const Eigen::VectorXd& f) const {
  return onb_ * (w_ * (onb_.transpose() * f));
}

Eigen::VectorXd HydroProjector::complement(const Eigen::VectorXd& f) const {
  return f - apply(f);
}

// ---------------------------------------------------------------------------
// linearized operator assembly from the closed-form hard-sphere kernels
// ---------------------------------------------------------------------------

namespace {

inline double kernel_k1(const Vec3& v, const Vec3& eta) {
  const double d = (v - eta).norm();
  static const double c1 = 2.0 * kPi * std::pow(2.0 * kPi, -1.5);
  return c1 * d * std::exp(-0.25 * (v.squaredNorm() + eta.squaredNorm()));
}

inline double kernel_k2(const Vec3& v, const Vec3& eta) {
  const Vec3 d = v - eta;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) return std::numeric_limits<double>::infinity();
  const double r = std::sqrt(r2);
  static const double c2 = 2.0 * std::sqrt(2.0 / kPi);
  const double t = v.squaredNorm() - eta.squaredNorm();
  return c2 / r * std::exp(-0.125 * r2 - 0.125 * t * t / r2);
}

inline double kernel_k(const Vec3& v, const Vec3& eta) {
  return kernel_k2(v, eta) - kernel_k1(v, eta);
}

struct GL4 {
  double x[4] = {-0.4305681557970263, -0.1699905217924281, 0.1699905217924281,
                 0.4305681557970263};
  double w[4] = {0.1739274225687269, 0.3260725774312731, 0.3260725774312731,
                 0.1739274225687269};
};

double cell_integral_k(const Vec3& v, const Vec3& eta0, double h) {
  static const GL4 gl;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const Vec3 p = eta0 + h * Vec3(gl.x[a], gl.x[b], gl.x[c]);
        acc += gl.w[a] * gl.w[b] * gl.w[c] * kernel_k(v, p);
      }
  return acc * h * h * h;
}

// cell containing the 1/r singularity: radial-sphere quadrature, the r^2
// Jacobian absorbs the singular factor
double diagonal_cell_integral(const Vec3& v, double h) {
  static const SphereRule sphere = SphereRule::lebedev(50);
  static const GL4 gl;
  const double half = 0.5 * h;
  double acc = 0.0;
  for (std::size_t s = 0; s < sphere.nodes.size(); ++s) {
    const Vec3& dir = sphere.nodes[s];
    const double mx = std::max({std::abs(dir[0]), std::abs(dir[1]), std::abs(dir[2])});
    const double R = half / mx;
    double rad = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double r = (gl.x[a] + 0.5) * R;
      rad += gl.w[a] * R * r * r * kernel_k(v, v + r * dir);
    }
    acc += sphere.weights[s] * rad;
  }
  return acc;
}

struct CacheHeader {
  char magic[8] = {'E', 'X', 'K', 'O', 'P', 'C', '0', '1'};
  std::uint64_t grid_hash = 0;
  double eps = 0;
  double c[3] = {0, 0, 0};
  double theta = 0;
  std::int32_t angular = 0;
  std::int32_t n = 0;
  double sym_defect = 0, null_pre = 0, null_post = 0;
};

bool header_matches(const CacheHeader& h, const DriftContext& d, const CollisionKernel& k,
                    const VelocityGrid& g) {
  CacheHeader ref;
  if (std::memcmp(h.magic, ref.magic, 8) != 0) return false;
  return h.grid_hash == g.hash() && h.eps == d.eps && h.c[0] == d.c_inf[0] &&
         h.c[1] == d.c_inf[1] && h.c[2] == d.c_inf[2] && h.theta == k.theta &&
         h.angular == k.angular_nodes && h.n == g.size();
}

}  // namespace

LinearizedOperator build_linearized(const DriftContext& drift, const CollisionKernel& kernel,
                                    const VelocityGrid& grid, const std::string& cache_path) {
  if (kernel.theta != 1.0)
    throw ConfigError("build_linearized: only hard spheres (theta = 1) are implemented");
  LinearizedOperator op;
  op.grid_ = &grid;
  op.drift_ = drift;
  op.kernel_ = kernel;
  op.proj_ = std::make_shared<HydroProjector>(grid, drift);
  const int n = grid.size();

  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    std::ifstream f(cache_path, std::ios::binary);
    CacheHeader h;
    f.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (f && header_matches(h, drift, kernel, grid)) {
      op.nu_.resize(n);
      op.K_.resize(n, n);
      f.read(reinterpret_cast<char*>(op.nu_.data()),
             static_cast<std::streamsize>(sizeof(double) * n));
      f.read(reinterpret_cast<char*>(op.K_.data()),
             static_cast<std::streamsize>(sizeof(double) * n * n));
      if (f) {
        op.sym_defect_ = h.sym_defect;
        op.null_defect_pre_ = h.null_pre;
        op.null_defect_post_ = h.null_post;
        return op;
      }
    }
  }

  const double h = grid.spacing();
  const double wq = grid.weight();
  const Vec3 shift = drift.shift();

  op.nu_.resize(n);
  for (int i = 0; i < n; ++i) op.nu_[i] = nu_hard_sphere((grid.node(i) - shift).norm());

  Eigen::MatrixXd K(n, n);
  const double near2 = sqr(2.5 * h);
  for (int i = 0; i < n; ++i) {
    const Vec3 vi = grid.node(i) - shift;
    for (int j = 0; j < n; ++j) {
      const Vec3 vj = grid.node(j) - shift;
      const double d2 = (vi - vj).squaredNorm();
      if (j == i)
        K(i, j) = diagonal_cell_integral(vi, h);
      else if (d2 <= near2)
        K(i, j) = cell_integral_k(vi, vj, h);
      else
        K(i, j) = wq * kernel_k(vi, vj);
    }
  }

  double defect = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      defect = std::max(defect, std::abs(K(i, j) - K(j, i)));
      scale = std::max(scale, std::abs(K(i, j)));
    }
  op.sym_defect_ = (scale > 0) ? defect / scale : 0.0;
  K = 0.5 * (K + K.transpose()).eval();

  Eigen::MatrixXd M = Eigen::MatrixXd(op.nu_.asDiagonal()) - K;
  const Eigen::MatrixXd& V = op.proj_->orthonormal_basis();
  const double nu_scale = op.nu_.mean();
  double pre = 0.0;
  for (int c = 0; c < 5; ++c)
    pre = std::max(pre, (M * V.col(c)).norm() / (nu_scale * V.col(c).norm()));
  op.null_defect_pre_ = pre;

  // exact null space: M <- (I-P) M (I-P)
  Eigen::MatrixXd PM = wq * (V * (V.transpose() * M));
  M -= PM;
  Eigen::MatrixXd MP = wq * ((M * V) * V.transpose());
  M -= MP;
  M = 0.5 * (M + M.transpose()).eval();

  double post = 0.0;
  for (int c = 0; c < 5; ++c)
    post = std::max(post, (M * V.col(c)).norm() / (nu_scale * V.col(c).norm()));
  op.null_defect_post_ = post;

  op.K_ = Eigen::MatrixXd(op.nu_.asDiagonal()) - M;

  if (!cache_path.empty()) {
    std::ofstream f(cache_path, std::ios::binary);
    if (f) {
      CacheHeader hh;
      hh.grid_hash = grid.hash();
      hh.eps = drift.eps;
      for (int a = 0; a < 3; ++a) hh.c[a] = drift.c_inf[a];
      hh.theta = kernel.theta;
      hh.angular = kernel.angular_nodes;
      hh.n = n;
      hh.sym_defect = op.sym_defect_;
      hh.null_pre = op.null_defect_pre_;
      hh.null_post = op.null_defect_post_;
      f.write(reinterpret_cast<const char*>(&hh), sizeof(hh));
      f.write(reinterpret_cast<const char*>(op.nu_.data()),
              static_cast<std::streamsize>(sizeof(double) * n));
      f.write(reinterpret_cast<const char*>(op.K_.data()),
              static_cast<std::streamsize>(sizeof(double) * n * n));
    }
  }
  return op;
}

Eigen::VectorXd LinearizedOperator::apply(const Eigen::VectorXd& f) const {
  return nu_.cwiseProduct(f) - K_ * f;
}

Eigen::VectorXd LinearizedOperator::apply_K(const Eigen::VectorXd& f) const { return K_ * f; }

Eigen::MatrixXd LinearizedOperator::apply_K(const Eigen::MatrixXd& F) const { return K_ * F; }

Eigen::MatrixXd LinearizedOperator::apply(const Eigen::MatrixXd& F) const {
  return nu_.asDiagonal() * F - K_ * F;
}

double LinearizedOperator::dirichlet(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return grid_->weight() * f.dot(apply(g));
}

void LinearizedOperator::ensure_factorization() const {
  if (linv_) return;
  const Eigen::MatrixXd& V = proj_->orthonormal_basis();
  const double wq = grid_->weight();
  const double sigma = nu_.mean();
  Eigen::MatrixXd S = Eigen::MatrixXd(nu_.asDiagonal()) - K_;
  S += (sigma * wq) * (V * V.transpose());
  linv_ = std::make_shared<Eigen::LDLT<Eigen::MatrixXd>>(S);
}

Eigen::VectorXd LinearizedOperator::solve_linv(const Eigen::VectorXd& rhs,
                                               double tol_proj) const {
  const double scale = rhs.norm();
  if (scale == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  const double pnorm = proj_->apply(rhs).norm();
  if (pnorm > std::max(tol_proj * 1e3, 1e-9) * scale)
    throw NonOrthogonalRHS("solve_linv: hydrodynamic part of rhs is " +
                           std::to_string(pnorm / scale) + " relative");
  ensure_factorization();
  Eigen::VectorXd x = linv_->solve(rhs);
  return proj_->complement(x);
}

double spectral_gap(const LinearizedOperator& op) {
  const int n = op.grid().size();
  Eigen::VectorXd dis = op.nu().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd B =
      dis.asDiagonal() * (Eigen::MatrixXd(op.nu().asDiagonal()) - op.K()) * dis.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::MatrixXd U = op.nu().cwiseSqrt().asDiagonal() * op.projector().orthonormal_basis();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
  U = qr.householderQ() * Eigen::MatrixXd::Identity(n, 5);
  const double sigma = 10.0;
  Eigen::MatrixXd C = B + sigma * (U * U.transpose());
  Eigen::LDLT<Eigen::MatrixXd> f(C);

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  x -= U * (U.transpose() * x);
  x.normalize();
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd y = f.solve(x);
    y -= U * (U.transpose() * y);
    y.normalize();
    const double lam_new = y.dot(C * y);
    const bool done = it > 3 && std::abs(lam_new - lam) < 1e-12 * std::abs(lam_new);
    lam = lam_new;
    x = y;
    if (done) break;
  }
  return lam;
}

double nu_exponent_fit(const LinearizedOperator& op, double lo, double hi) {
  std::vector<double> xs, ys;
  const auto& grid = op.grid();
  for (int i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i).norm();
    if (r >= lo && r <= hi) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(op.nu()[i]));
    }
  }
  Eigen::Map<Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  Eigen::Map<Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return fit_slope(x, y);
}

TransportCoefficients compute_transport(const LinearizedOperator& op) {
  const auto& grid = op.grid();
  const auto& proj = op.projector();
  const int n = grid.size();
  const double wq = grid.weight();
  const Vec3 shift = op.drift().shift();

  TransportCoefficients tc;
  tc.B.resize(n, 6);
  tc.A.resize(n, 3);
  const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

  Eigen::MatrixXd rhsB(n, 6);
  for (int c = 0; c < 6; ++c) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 vc = grid.node(i) - shift;
      r[i] = vc[pairs[c][0]] * vc[pairs[c][1]] * std::sqrt(mu_standard(vc));
    }
    rhsB.col(c) = proj.complement(r);
    tc.B.col(c) = op.solve_linv(rhsB.col(c));
  }
  double visc = 0.0;
  for (int c = 3; c < 6; ++c) visc += wq * tc.B.col(c).dot(rhsB.col(c));
  tc.viscosity = visc / 3.0;

  double kap = 0.0;
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 vc = grid.node(i) - shift;
      r[i] = 0.5 * vc[c] * (vc.squaredNorm() - 5.0) * std::sqrt(mu_standard(vc));
    }
    r = proj.complement(r);
    tc.A.col(c) = op.solve_linv(r);
    kap += wq * tc.A.col(c).dot(r);
  }
  tc.heat_conductivity = kap / 3.0;
  return tc;
}

}  // namespace exkin
