#include "exkin/diagnostics.hpp"

#include <cmath>

namespace exkin {

double lp_norm(const KineticField& f, const SpatialMesh& mesh, const VelocityGrid& grid,
               double p) {
  if (std::isinf(p)) return f.vals.cwiseAbs().maxCoeff();
  double acc = 0;
  const double wv = grid.weight();
  for (int c = 0; c < f.n_cells(); ++c)
    acc += mesh.volume(c) * wv * f.vals.col(c).cwiseAbs().array().pow(p).sum();
  return std::pow(acc, 1.0 / p);
}

double lp_norm_projected(const KineticField& f, const SpatialMesh& mesh,
                         const LinearizedOperator& op, double p, bool hydro_part) {
  KineticField g(f.n_v(), f.n_cells());
  for (int c = 0; c < f.n_cells(); ++c)
    g.vals.col(c) = hydro_part ? op.projector().apply(f.vals.col(c))
                               : op.projector().complement(f.vals.col(c));
  return lp_norm(g, mesh, op.grid(), p);
}

NormReport composite_norm(const KineticField& f, const LinearizedOperator& op,
                          const WeightFunction& w, const SpatialMesh& mesh,
                          const BoundaryOperator& bop, const BoundaryData* incoming_trace) {
  const VelocityGrid& grid = op.grid();
  const double eps = op.drift().eps;
  const double wv = grid.weight();
  NormReport rep;
  rep.eps = eps;
  rep.c_mag = op.drift().c_inf.norm();
  rep.beta = w.beta();
  rep.beta_prime = w.beta_prime();

  // microscopic nu-weighted L2 and the macroscopic L6 / L3
  double micro2 = 0, l6 = 0, l3 = 0, winf = 0;
  Eigen::VectorXd wvals(grid.size());
  for (int i = 0; i < grid.size(); ++i) wvals[i] = w(grid.node(i));
  for (int c = 0; c < f.n_cells(); ++c) {
    const Eigen::VectorXd pc = op.projector().apply(f.vals.col(c));
    const Eigen::VectorXd mic = f.vals.col(c) - pc;
    micro2 += mesh.volume(c) * wv * mic.cwiseProduct(op.nu()).dot(mic);
    l6 += mesh.volume(c) * wv * pc.array().abs().pow(6.0).sum();
    l3 += mesh.volume(c) * wv * pc.array().abs().pow(3.0).sum();
    winf = std::max(winf, wvals.cwiseProduct(f.vals.col(c)).cwiseAbs().maxCoeff());
  }
  rep.micro_nu = std::sqrt(micro2) / eps;
  rep.macro_l6 = std::pow(l6, 1.0 / 6.0);
  rep.macro_l3 = std::sqrt(eps) * std::pow(l3, 1.0 / 3.0);
  rep.weighted_inf = std::sqrt(eps) * winf;

  // boundary norms: the outgoing trace is the first-shell cell value (upwind),
  // the incoming trace is the supplied boundary condition when available
  double b2 = 0, f2p = 0, f2m = 0, finfm = 0;
  for (int k = 0; k < bop.n_faces(); ++k) {
    const int fid = bop.face_id(k);
    const auto& face = mesh.faces()[fid];
    const Eigen::VectorXd ftr = f.vals.col(face.cell_in);
    const Eigen::VectorXd refl = bop.apply_diffuse_reflection(k, ftr);
    for (int i : bop.outgoing_nodes(k)) {
      const double d = face.area * wv * bop.vdotn_abs(k)[i];
      f2p += d * sqr(ftr[i]);
    }
    // (1 - P_gamma^c) f on gamma_+ needs the emitted profile at outgoing
    // nodes; P_gamma^c f has the emission shape on the whole velocity space
    const double zp = bop.z_plus(k, ftr);
    for (int i : bop.outgoing_nodes(k)) {
      const double d = face.area * wv * bop.vdotn_abs(k)[i];
      const double pg = bop.emission(k)[i] * zp;
      b2 += d * sqr(ftr[i] - pg);
    }
    const Eigen::VectorXd fin = incoming_trace ? incoming_trace->vals.col(k).eval()
                                               : ftr;
    for (int i : bop.incoming_nodes(k)) {
      const double d = face.area * wv * bop.vdotn_abs(k)[i];
      f2m += d * sqr(fin[i]);
      finfm = std::max(finfm, std::abs(fin[i]));
    }
    (void)refl;
  }
  rep.boundary = std::sqrt(b2 / eps);
  rep.f_2plus = std::sqrt(f2p);
  rep.f_2minus = std::sqrt(f2m);
  rep.f_inf_minus = finfm;
  return rep;
}

namespace {
double boundary_lp_minus(const BoundaryData& r, const BoundaryOperator& bop,
                         const SpatialMesh& mesh, double p,
                         const Eigen::VectorXd* wvals = nullptr) {
  const double wv = bop.grid().weight();
  if (std::isinf(p)) {
    double m = 0;
    for (int k = 0; k < bop.n_faces(); ++k)
      for (int i : bop.incoming_nodes(k)) {
        const double x = std::abs(r.vals(i, k)) * (wvals ? (*wvals)[i] : 1.0);
        m = std::max(m, x);
      }
    return m;
  }
  double acc = 0;
  for (int k = 0; k < bop.n_faces(); ++k) {
    const double area = mesh.faces()[bop.face_id(k)].area;
    for (int i : bop.incoming_nodes(k)) {
      const double x = std::abs(r.vals(i, k)) * (wvals ? (*wvals)[i] : 1.0);
      acc += area * wv * bop.vdotn_abs(k)[i] * std::pow(x, p);
    }
  }
  return std::pow(acc, 1.0 / p);
}
}  // namespace

Eigen::VectorXd z_gamma_per_face(const KineticField& f, const BoundaryOperator& bop) {
  Eigen::VectorXd z(bop.n_faces());
  for (int k = 0; k < bop.n_faces(); ++k) {
    const int cell = bop.mesh().faces()[bop.face_id(k)].cell_in;
    z[k] = bop.z_plus(k, f.vals.col(cell));
  }
  return z;
}

MFunctionalReport m_functional(const KineticField& g, const BoundaryData& r,
                               const LinearizedOperator& op, const WeightFunction& w,
                               const SpatialMesh& mesh, const BoundaryOperator& bop,
                               double rho, double sigma) {
  if (!(sigma > 0 && sigma <= 0.1)) throw ConfigError("m_functional: sigma out of (0, 0.1]");
  if (!(rho > 0 && rho < 1)) throw ConfigError("m_functional: rho out of (0, 1)");
  const VelocityGrid& grid = op.grid();
  const double eps = op.drift().eps;
  const double cmag = std::max(op.drift().c_inf.norm(), 1e-300);
  const double wv = grid.weight();
  MFunctionalReport rep;
  rep.rho = rho;
  rep.sigma = sigma;

  Eigen::VectorXd wvals(grid.size()), nis(grid.size());
  for (int i = 0; i < grid.size(); ++i) wvals[i] = w(grid.node(i));
  nis = op.nu().cwiseSqrt().cwiseInverse();

  // volume terms
  double t_micro = 0, t_32 = 0, t_winf = 0, t_pc2 = 0, t_pc65 = 0, t_pc65m = 0;
  const double p65 = 6.0 / 5.0;
  const double p65m = 1.19;  // the (6/5)^- exponent, pinned
  for (int c = 0; c < g.n_cells(); ++c) {
    const Eigen::VectorXd pc = op.projector().apply(g.vals.col(c));
    const Eigen::VectorXd mic = g.vals.col(c) - pc;
    const double vol = mesh.volume(c);
    t_micro += vol * wv * nis.cwiseProduct(mic).squaredNorm();
    t_32 += vol * wv * nis.cwiseProduct(g.vals.col(c)).array().abs().pow(1.5).sum();
    for (int i = 0; i < grid.size(); ++i) {
      const double x = std::abs(wvals[i] * g.vals(i, c)) / vbracket(grid.node(i));
      t_winf = std::max(t_winf, x);
    }
    t_pc2 += vol * wv * pc.squaredNorm();
    t_pc65 += vol * wv * pc.array().abs().pow(p65).sum();
    t_pc65m += vol * wv * pc.array().abs().pow(p65m).sum();
  }
  rep.terms["nu_micro_g_2sq"] = t_micro;
  rep.terms["eps_nu_g_32sq"] = eps * sqr(std::pow(t_32, 1.0 / 1.5));
  rep.terms["eps3_wg_infsq"] = std::pow(eps, 3.0) * sqr(t_winf);
  rep.terms["pc_g_2sq"] = t_pc2;
  rep.terms["pc_g_65sq"] = std::pow(eps, -2.0) * std::pow(cmag, -2.0) *
                           sqr(std::pow(t_pc65, 1.0 / p65));
  rep.terms["pc_g_65minus_sq"] = std::pow(eps, -2.0 * sigma) *
                                 std::pow(cmag, -4.0 + 4.0 * rho) *
                                 sqr(std::pow(t_pc65m, 1.0 / p65m));

  // boundary terms
  const double r2m = boundary_lp_minus(r, bop, mesh, 2.0);
  const double rwinf =
      boundary_lp_minus(r, bop, mesh, std::numeric_limits<double>::infinity(), &wvals);
  rep.terms["r_2minus_sq"] = sqr(r2m);
  rep.terms["eps_wr_infminus_sq"] = eps * sqr(rwinf);

  double z2 = 0;
  for (int k = 0; k < bop.n_faces(); ++k) {
    const double area = mesh.faces()[bop.face_id(k)].area;
    z2 += area * sqr(bop.z_minus(k, r.vals.col(k)));
  }
  rep.terms["zgamma_r_sq"] =
      (std::pow(eps, 0.5 - 2.0 * sigma) * std::pow(cmag, -2.0 + 2.0 * rho) +
       1.0 / (cmag * eps)) *
      z2;

  rep.total = 0;
  for (const auto& [k, v] : rep.terms) rep.total += v;
  return rep;
}

EnergyLedger energy_ledger(const KineticField& f, const KineticField& g,
                           const BoundaryData& r, const LinearizedOperator& op,
                           const SpatialMesh& mesh, const BoundaryOperator& bop) {
  const VelocityGrid& grid = op.grid();
  const double eps = op.drift().eps;
  const double cmag = op.drift().c_inf.norm();
  const double wv = grid.weight();
  EnergyLedger led;

  // volume contributions of the Green identity and the energy balance
  double dirichlet = 0, fg = 0;
  for (int c = 0; c < f.n_cells(); ++c) {
    dirichlet += mesh.volume(c) * wv * f.vals.col(c).dot(op.apply(f.vals.col(c)));
    fg += mesh.volume(c) * wv * f.vals.col(c).dot(g.vals.col(c));
  }
  led.terms["dirichlet_fLf"] = dirichlet;
  led.terms["source_fg"] = fg;

  // boundary integrals of f^2 and the P_gamma flux mismatch
  double gp = 0, gm = 0, mismatch_p = 0, mismatch_m = 0, f2p = 0;
  for (int k = 0; k < bop.n_faces(); ++k) {
    const auto& face = mesh.faces()[bop.face_id(k)];
    const Eigen::VectorXd ftr = f.vals.col(face.cell_in);
    const double zp = bop.z_plus(k, ftr);
    const Eigen::VectorXd pg_full = bop.emission(k) * zp;  // emission shape everywhere
    // incoming trace from the boundary condition actually imposed
    Eigen::VectorXd fin = pg_full + std::sqrt(eps) * r.vals.col(k);
    for (int i : bop.outgoing_nodes(k)) {
      const double d = face.area * wv * bop.vdotn_abs(k)[i];
      gp += d * sqr(ftr[i]);
      mismatch_p += d * sqr(pg_full[i]);
      f2p += d * sqr(ftr[i]);
    }
    for (int i : bop.incoming_nodes(k)) {
      const double d = face.area * wv * bop.vdotn_abs(k)[i];
      gm += d * sqr(fin[i]);
      mismatch_m += d * sqr(pg_full[i]);
    }
  }
  led.terms["gamma_plus_f2"] = gp;
  led.terms["gamma_minus_f2"] = gm;
  led.terms["pgamma_plus_sq"] = mismatch_p;
  led.terms["pgamma_minus_sq"] = mismatch_m;
  led.pgamma_flux_mismatch = std::abs(mismatch_p - mismatch_m);
  const double denom = eps * cmag * f2p;
  led.mismatch_prefactor = denom > 0 ? led.pgamma_flux_mismatch / denom : 0.0;

  // steady Green identity: int 2 f (v.grad f) = gamma_+ - gamma_-, with
  // v.grad f replaced by the transport part of the equation, eps^-1 L f - g
  // carried to the other side:  0.5(gp - gm) + eps^-1 <f,Lf> - <f,g> ~ 0
  led.green_residual = 0.5 * (gp - gm) + dirichlet / eps - fg;
  led.terms["green_residual"] = led.green_residual;
  return led;
}

}  // namespace exkin
