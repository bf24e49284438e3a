#include "exkin/hilbert_expansion.hpp"

#include <cmath>

namespace exkin {

FluidField FluidField::zero(int n_cells) {
  FluidField f;
  f.u = Eigen::MatrixXd::Zero(3, n_cells);
  f.grad_u = Eigen::MatrixXd::Zero(9, n_cells);
  f.p = Eigen::VectorXd::Zero(n_cells);
  return f;
}

void FluidField::fd_gradients(const SpatialMesh& mesh) {
  grad_u.resize(9, mesh.n_cells());
  for (int i = 0; i < 3; ++i) {
    Eigen::MatrixXd g = mesh.gradient(u.row(i).transpose());
    for (int j = 0; j < 3; ++j) grad_u.row(3 * i + j) = g.row(j);
  }
}

void FluidField::measure_defects(const SpatialMesh& mesh, const Vec3& c_inf) {
  div_defect = 0;
  for (int c = 0; c < mesh.n_cells(); ++c)
    div_defect = std::max(std::abs(grad_u(0, c) + grad_u(4, c) + grad_u(8, c)), div_defect);
  bc_defect = 0;
  for (int it = 0; it < mesh.ntheta(); ++it)
    for (int ip = 0; ip < mesh.nphi(); ++ip) {
      const int c = mesh.cell_index(0, it, ip);
      bc_defect = std::max((u.col(c) + c_inf).norm(), bc_defect);
    }
}

KineticField build_f1(const FluidField& fluid, const DriftContext& drift,
                      const VelocityGrid& grid) {
  const int nv = grid.size(), nc = static_cast<int>(fluid.u.cols());
  KineticField f1(nv, nc);
  Eigen::MatrixXd phi(nv, 3);  // v_c,i sqrt(mu_c)
  for (int i = 0; i < nv; ++i) {
    const Vec3 vc = drift.v_c(grid.node(i));
    const double s = drift.sqrt_mu_c(grid.node(i));
    for (int a = 0; a < 3; ++a) phi(i, a) = vc[a] * s;
  }
  f1.vals = phi * fluid.u;
  return f1;
}

namespace {
// v . grad applied to a kinetic field by the mesh FD gradient
KineticField transport_fd(const KineticField& f, const SpatialMesh& mesh,
                          const VelocityGrid& grid) {
  const int nv = f.n_v(), nc = f.n_cells();
  KineticField out(nv, nc);
  for (int i = 0; i < nv; ++i) {
    Eigen::MatrixXd g = mesh.gradient(f.vals.row(i).transpose());
    out.vals.row(i) = grid.node(i).transpose() * g;
  }
  return out;
}
}  // namespace

double f1_projection_residual(const FluidField& fluid, const KineticField& f1,
                              const SpatialMesh& mesh, const LinearizedOperator& op) {
  KineticField t = transport_fd(f1, mesh, op.grid());
  double num = 0, den = 0;
  const double wv = op.grid().weight();
  for (int c = 0; c < t.n_cells(); ++c) {
    const double vol = mesh.volume(c);
    const Eigen::VectorXd pc = op.projector().apply(t.vals.col(c));
    num += vol * wv * pc.squaredNorm();
    den += vol * wv * t.vals.col(c).squaredNorm();
  }
  return den > 0 ? std::sqrt(num / den) : 0.0;
}

KineticField build_f2(const FluidField& fluid, const LinearizedOperator& op,
                      ExpansionTerms* basis_out) {
  const VelocityGrid& grid = op.grid();
  const DriftContext& drift = op.drift();
  const int nv = grid.size(), nc = static_cast<int>(fluid.u.cols());
  const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

  Eigen::MatrixXd phi(nv, 3);
  for (int i = 0; i < nv; ++i) {
    const Vec3 vc = drift.v_c(grid.node(i));
    const double s = drift.sqrt_mu_c(grid.node(i));
    for (int a = 0; a < 3; ++a) phi(i, a) = vc[a] * s;
  }

  // gradient part: -L^{-1}(I-P)[v_ci v_cj sqrt(mu_c)], contracted with the
  // symmetrized velocity gradient
  Eigen::MatrixXd Mgrad(nv, 6);
  for (int q = 0; q < 6; ++q) {
    Eigen::VectorXd r(nv);
    for (int i = 0; i < nv; ++i) {
      const Vec3 vc = drift.v_c(grid.node(i));
      r[i] = vc[pairs[q][0]] * vc[pairs[q][1]] * drift.sqrt_mu_c(grid.node(i));
    }
    Mgrad.col(q) = -op.solve_linv(op.projector().complement(r));
  }

  // quadratic part: L^{-1}(I-P) GammaTilde(phi_i, phi_j)
  Eigen::MatrixXd Gquad(nv, 6);
  for (int q = 0; q < 6; ++q) {
    Eigen::VectorXd gt = gamma_tilde(phi.col(pairs[q][0]), phi.col(pairs[q][1]), drift,
                                     op.kernel(), grid);
    Gquad.col(q) = op.solve_linv(op.projector().complement(gt));
  }

  KineticField f2(nv, nc);
  for (int c = 0; c < nc; ++c) {
    Eigen::Matrix<double, 6, 1> sc, qc;
    for (int q = 0; q < 6; ++q) {
      const int i = pairs[q][0], j = pairs[q][1];
      const double sij = 0.5 * (fluid.grad_u(3 * i + j, c) + fluid.grad_u(3 * j + i, c));
      sc[q] = (i == j) ? sij : 2.0 * sij;
      qc[q] = (i == j) ? fluid.u(i, c) * fluid.u(j, c) : 2.0 * fluid.u(i, c) * fluid.u(j, c);
    }
    f2.vals.col(c) = Mgrad * sc + Gquad * qc;
  }

  if (basis_out) {
    basis_out->Mgrad = Mgrad;
    basis_out->Gquad = Gquad;
  }
  return f2;
}

KineticField build_phi_eps(const FluidField& fluid, const DriftContext& drift,
                           const VelocityGrid& grid) {
  const int nv = grid.size(), nc = static_cast<int>(fluid.u.cols());
  const double eps = drift.eps;
  KineticField phi(nv, nc);
  for (int c = 0; c < nc; ++c) {
    const Vec3 u = fluid.u.col(c);
    const double w = u.dot(drift.c_inf) + 0.5 * u.squaredNorm();
    for (int i = 0; i < nv; ++i) {
      const Vec3& v = grid.node(i);
      const Vec3 vc = drift.v_c(v);
      const double E = eps * u.dot(v) - eps * eps * w;
      // exp(E) - 1 - eps u.v_c evaluated without cancellation
      phi.vals(i, c) = drift.sqrt_mu_c(v) * (std::expm1(E) - eps * u.dot(vc)) / (eps * eps);
    }
  }
  return phi;
}

ExpansionTerms build_expansion(const FluidField& fluid, const LinearizedOperator& op,
                               double m0) {
  const VelocityGrid& grid = op.grid();
  const DriftContext& drift = op.drift();
  const double eps = drift.eps;
  const int nv = grid.size(), nc = static_cast<int>(fluid.u.cols());

  ExpansionTerms t;
  t.f1 = build_f1(fluid, drift, grid);
  t.f2 = build_f2(fluid, op, &t);
  t.phi_eps = build_phi_eps(fluid, drift, grid);

  double pc = 0;
  for (int c = 0; c < nc; ++c)
    pc = std::max(pc, op.projector().apply(t.f2.vals.col(c)).norm());
  t.f2_pc_residual = pc;

  const Eigen::VectorXd smu = grid.sample_sqrt_mu_c(drift);
  const Eigen::VectorXd mu = grid.sample_mu_c(drift);

  const double vmax_node = std::sqrt(3.0) * grid.cutoff();
  double m = m0;
  for (;;) {
    const double cut = std::pow(eps, -m);
    t.chi.resize(nv);
    for (int i = 0; i < nv; ++i) t.chi[i] = (grid.node(i).norm() < cut) ? 1.0 : 0.0;
    t.Q_profile = KineticField(nv, nc);
    for (int c = 0; c < nc; ++c)
      t.Q_profile.vals.col(c) =
          t.f1.vals.col(c) +
          eps * (t.chi.cwiseProduct(t.f2.vals.col(c)) +
                 (1.0 - t.chi.array()).matrix().cwiseProduct(t.phi_eps.vals.col(c)));
    double mn = std::numeric_limits<double>::max();
    for (int c = 0; c < nc; ++c)
      mn = std::min(mn, (mu + eps * smu.cwiseProduct(t.Q_profile.vals.col(c))).minCoeff());
    t.min_profile = mn;
    t.m = m;
    if (mn >= 0.0) break;
    if (std::pow(eps, -m) > vmax_node) {
      // chi is already identically 1 on the lattice and positivity still
      // fails: the fluid data is outside the regime the profile supports
      throw NumericalFailure("build_expansion: truncated profile not positive, min = " +
                             std::to_string(mn));
    }
    m += 0.25;
  }

  // low-rank surrogate of Q for the iteration's linearized collision maps
  t.q_basis.resize(nv, 22);
  const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  {
    Eigen::MatrixXd phi(nv, 3), quad(nv, 6);
    Eigen::VectorXd smu_only(nv);
    for (int i = 0; i < nv; ++i) {
      const Vec3 vc = drift.v_c(grid.node(i));
      const double s = drift.sqrt_mu_c(grid.node(i));
      smu_only[i] = s;
      for (int a = 0; a < 3; ++a) phi(i, a) = vc[a] * s;
      for (int q = 0; q < 6; ++q) quad(i, q) = vc[pairs[q][0]] * vc[pairs[q][1]] * s;
    }
    const Eigen::VectorXd chibar = (1.0 - t.chi.array()).matrix();
    t.q_basis.leftCols(3) = phi;
    for (int q = 0; q < 6; ++q) {
      t.q_basis.col(3 + q) = t.chi.cwiseProduct(t.Mgrad.col(q));
      t.q_basis.col(9 + q) = t.chi.cwiseProduct(t.Gquad.col(q));
      t.q_basis.col(15 + q) = chibar.cwiseProduct(quad.col(q));
    }
    t.q_basis.col(21) = chibar.cwiseProduct(smu_only);
  }
  t.q_coeffs.resize(22, nc);
  for (int c = 0; c < nc; ++c) {
    const Vec3 u = fluid.u.col(c);
    for (int a = 0; a < 3; ++a) t.q_coeffs(a, c) = u[a];
    for (int q = 0; q < 6; ++q) {
      const int i = pairs[q][0], j = pairs[q][1];
      const double sij = 0.5 * (fluid.grad_u(3 * i + j, c) + fluid.grad_u(3 * j + i, c));
      const double mult = (i == j) ? 1.0 : 2.0;
      t.q_coeffs(3 + q, c) = eps * mult * sij;
      t.q_coeffs(9 + q, c) = eps * mult * u[i] * u[j];
      t.q_coeffs(15 + q, c) = eps * ((i == j) ? 0.5 : 1.0) * u[i] * u[j];
    }
    t.q_coeffs(21, c) = -eps * (u.dot(drift.c_inf) + 0.5 * u.squaredNorm());
  }
  {
    const Eigen::MatrixXd recon = t.q_basis * t.q_coeffs;
    const double scale = t.Q_profile.vals.cwiseAbs().maxCoeff();
    t.q_basis_err =
        scale > 0 ? (recon - t.Q_profile.vals).cwiseAbs().maxCoeff() / scale : 0.0;
  }
  return t;
}

SourceTerms build_sources(const ExpansionTerms& terms, const FluidField& fluid,
                          const LinearizedOperator& op, const SpatialMesh& mesh,
                          const GammaOptions& gopts) {
  const VelocityGrid& grid = op.grid();
  const DriftContext& drift = op.drift();
  const double eps = drift.eps;
  const int nv = grid.size(), nc = mesh.n_cells();
  const auto& proj = op.projector();

  SourceTerms s;
  s.A_c = KineticField(nv, nc);
  s.Abar_c = KineticField(nv, nc);

  // transport terms by centered differences on the mesh
  KineticField vgrad_f2 = transport_fd(terms.f2, mesh, grid);

  // chi f2 + chibar phi_eps and its transport
  KineticField f2cut(nv, nc), phicut(nv, nc), hmix(nv, nc);
  for (int c = 0; c < nc; ++c) {
    f2cut.vals.col(c) = terms.chi.cwiseProduct(terms.f2.vals.col(c));
    phicut.vals.col(c) =
        (1.0 - terms.chi.array()).matrix().cwiseProduct(terms.phi_eps.vals.col(c));
    hmix.vals.col(c) = f2cut.vals.col(c) + phicut.vals.col(c);
  }
  KineticField vgrad_hmix = transport_fd(hmix, mesh, grid);
  // chibar (phi_eps - f2) and its transport
  KineticField hbar(nv, nc);
  for (int c = 0; c < nc; ++c)
    hbar.vals.col(c) = (1.0 - terms.chi.array())
                           .matrix()
                           .cwiseProduct(terms.phi_eps.vals.col(c) - terms.f2.vals.col(c));
  KineticField vgrad_hbar = transport_fd(hbar, mesh, grid);

  double a_pc2 = 0, abar_pc2 = 0, abar2 = 0;
  const double wv = grid.weight();
  for (int c = 0; c < nc; ++c) {
    const Eigen::VectorXd f1c = terms.f1.vals.col(c);
    const Eigen::VectorXd f2c = terms.f2.vals.col(c);

    // A_c = -(I-P)[v.grad f2] + GammaTilde(2 f1 + eps f2, f2)
    Eigen::VectorXd coll =
        gamma_tilde(2.0 * f1c + eps * f2c, f2c, drift, op.kernel(), grid, gopts);
    s.A_c.vals.col(c) = -proj.complement(vgrad_f2.vals.col(c)) + coll;
    a_pc2 += mesh.volume(c) * wv * proj.apply(s.A_c.vals.col(c)).squaredNorm();

    // Abar_c assembled from its stated P_c and (I-P_c) parts
    const Eigen::VectorXd hm = hmix.vals.col(c);
    Eigen::VectorXd coll_bar =
        gamma_tilde(hm, 2.0 * f1c + eps * hm, drift, op.kernel(), grid, gopts);
    Eigen::VectorXd ip_part = proj.complement(vgrad_hmix.vals.col(c)) - coll_bar +
                              op.apply(hbar.vals.col(c)) / eps;
    ip_part = proj.complement(ip_part);
    Eigen::VectorXd p_part = proj.apply(vgrad_hbar.vals.col(c));
    s.Abar_c.vals.col(c) = p_part + ip_part;
    abar_pc2 += mesh.volume(c) * wv * p_part.squaredNorm();
    abar2 += mesh.volume(c) * wv * s.Abar_c.vals.col(c).squaredNorm();
  }
  s.pc_Ac_norm = std::sqrt(a_pc2);
  s.pc_Abar_rel = abar2 > 0 ? std::sqrt(abar_pc2 / abar2) : 0.0;
  return s;
}

BoundaryR build_boundary_r(const ExpansionTerms& terms, const BoundaryOperator& bop,
                           bool chi_cut) {
  const VelocityGrid& grid = bop.grid();
  const SpatialMesh& mesh = bop.mesh();
  const int nv = grid.size();
  BoundaryR out;
  out.r = BoundaryData(nv, bop.n_faces());

  double n2 = 0;
  for (int k = 0; k < bop.n_faces(); ++k) {
    const int fid = bop.face_id(k);
    const int cell = mesh.faces()[fid].cell_in;  // first-shell cell carries the trace
    Eigen::VectorXd h = terms.f2.vals.col(cell) - terms.phi_eps.vals.col(cell);
    if (chi_cut) h = terms.chi.cwiseProduct(h);
    Eigen::VectorXd r = bop.apply_diffuse_reflection(k, h);
    for (int i : bop.incoming_nodes(k)) r[i] -= h[i];
    // r lives on gamma_-; clear the outgoing half
    for (int i : bop.outgoing_nodes(k)) r[i] = 0.0;
    out.r.vals.col(k) = r;

    out.max_zminus = std::max(out.max_zminus, std::abs(bop.z_minus(k, r)));
    const double area = mesh.faces()[fid].area;
    for (int i : bop.incoming_nodes(k)) {
      n2 += area * grid.weight() * bop.vdotn_abs(k)[i] * sqr(r[i]);
      out.norm_inf = std::max(out.norm_inf, std::abs(r[i]));
    }
  }
  out.norm_2m = std::sqrt(n2);
  return out;
}

}  // namespace exkin
