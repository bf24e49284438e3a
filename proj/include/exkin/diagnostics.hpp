#pragma once

#include <map>

#include "exkin/boundary.hpp"
#include "exkin/collision_core.hpp"
#include "exkin/spatial_mesh.hpp"

namespace exkin {

// All five components of the composite norm plus the boundary norms that
// feed it.  composite() returns exactly the sum of the stored parts.
struct NormReport {
  double micro_nu = 0;     // eps^-1 ||(I-P_c) f||_nu
  double boundary = 0;     // eps^-1/2 |(1-P_gamma^c) f|_{2,+}
  double macro_l6 = 0;     // ||P_c f||_6
  double macro_l3 = 0;     // eps^1/2 ||P_c f||_3
  double weighted_inf = 0; // eps^1/2 ||w f||_inf
  double f_2plus = 0;      // |f|_{2,+}
  double f_2minus = 0;     // |f|_{2,-}
  double f_inf_minus = 0;  // |f|_{inf,-}
  double eps = 0, c_mag = 0, beta = 0, beta_prime = 0;

  double composite() const {
    return micro_nu + boundary + macro_l6 + macro_l3 + weighted_inf;
  }
};

// boundary traces of a cell field: outgoing = first-shell cell values,
// incoming = whatever the boundary condition produced (supplied by caller
// when available, else the cell values as a trace estimate)
NormReport composite_norm(const KineticField& f, const LinearizedOperator& op,
                          const WeightFunction& w, const SpatialMesh& mesh,
                          const BoundaryOperator& bop,
                          const BoundaryData* incoming_trace = nullptr);

// volume L^p norm over (x,v) of a kinetic field
double lp_norm(const KineticField& f, const SpatialMesh& mesh, const VelocityGrid& grid,
               double p);
// same restricted to the hydro or microscopic part
double lp_norm_projected(const KineticField& f, const SpatialMesh& mesh,
                         const LinearizedOperator& op, double p, bool hydro_part);

struct MFunctionalReport {
  std::map<std::string, double> terms;
  double total = 0;
  double rho = 0.1, sigma = 0.02;
};

// all summands of the linear-estimate functional M(g, r); the (6/5)^- norm is
// evaluated at the pinned exponent 1.19
MFunctionalReport m_functional(const KineticField& g, const BoundaryData& r,
                               const LinearizedOperator& op, const WeightFunction& w,
                               const SpatialMesh& mesh, const BoundaryOperator& bop,
                               double rho = 0.1, double sigma = 0.02);

struct EnergyLedger {
  std::map<std::string, double> terms;
  double green_residual = 0;       // Green identity defect
  double pgamma_flux_mismatch = 0; // lemma-2.3 style +/- mismatch of P_gamma f
  double mismatch_prefactor = 0;   // mismatch / (eps |c| |f|_{2,+}^2)
};

EnergyLedger energy_ledger(const KineticField& f, const KineticField& g,
                           const BoundaryData& r, const LinearizedOperator& op,
                           const SpatialMesh& mesh, const BoundaryOperator& bop);

// z_gamma(f) per wall face (outgoing flux) packed as a vector
Eigen::VectorXd z_gamma_per_face(const KineticField& f, const BoundaryOperator& bop);

}  // namespace exkin
