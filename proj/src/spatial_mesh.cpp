#include "exkin/spatial_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace exkin {

namespace {
constexpr double kPi = std::numbers::pi;

Vec3 radial_unit(double th, double ph) {
  return Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
}
Vec3 theta_unit(double th, double ph) {
  return Vec3(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
}
Vec3 phi_unit(double ph) { return Vec3(-std::sin(ph), std::cos(ph), 0.0); }
}  // namespace

SpatialMesh SpatialMesh::annulus(int nr, int ntheta, int nphi, double r_inner, double r_far) {
  if (nr < 2 || ntheta < 2 || nphi < 3) throw ConfigError("annulus: mesh too coarse");
  if (!(r_far > r_inner && r_inner > 0)) throw ConfigError("annulus: bad radii");
  SpatialMesh m;
  m.nr_ = nr;
  m.nth_ = ntheta;
  m.nph_ = nphi;
  m.r_inner_ = r_inner;
  m.r_far_ = r_far;

  // geometric radial edges, equal-cos theta bands, uniform phi
  m.r_edges_.resize(nr + 1);
  const double ratio = std::pow(r_far / r_inner, 1.0 / nr);
  for (int i = 0; i <= nr; ++i) m.r_edges_[i] = r_inner * std::pow(ratio, i);
  m.costh_edges_.resize(ntheta + 1);
  for (int t = 0; t <= ntheta; ++t) m.costh_edges_[t] = 1.0 - 2.0 * t / ntheta;
  m.phi_edges_.resize(nphi + 1);
  for (int p = 0; p <= nphi; ++p) m.phi_edges_[p] = 2.0 * kPi * p / nphi;

  const int nc = nr * ntheta * nphi;
  m.centers_.resize(nc);
  m.volumes_.resize(nc);
  m.cell_faces_.assign(nc, {});
  m.shell_r_.resize(nr);

  for (int ir = 0; ir < nr; ++ir) {
    const double r0 = m.r_edges_[ir], r1 = m.r_edges_[ir + 1];
    const double rc = 0.5 * (r0 + r1);
    m.shell_r_[ir] = rc;
    for (int it = 0; it < ntheta; ++it) {
      const double c0 = m.costh_edges_[it], c1 = m.costh_edges_[it + 1];
      const double thc = std::acos(0.5 * (c0 + c1));
      for (int ip = 0; ip < nphi; ++ip) {
        const double phc = 0.5 * (m.phi_edges_[ip] + m.phi_edges_[ip + 1]);
        const int c = m.cell_index(ir, it, ip);
        m.centers_[c] = rc * radial_unit(thc, phc);
        m.volumes_[c] =
            (r1 * r1 * r1 - r0 * r0 * r0) / 3.0 * (c0 - c1) * (2.0 * kPi / nphi);
      }
    }
  }

  auto add_face = [&m](Face f, const Vec3& vec_area) {
    f.area = vec_area.norm();
    f.normal = vec_area / f.area;
    const int id = static_cast<int>(m.faces_.size());
    m.faces_.push_back(f);
    m.cell_faces_[f.cell_in].push_back(id);
    if (f.cell_out >= 0) m.cell_faces_[f.cell_out].push_back(id);
    if (f.type == FaceType::wall) m.wall_faces_.push_back(id);
    if (f.type == FaceType::far_field) m.far_faces_.push_back(id);
    return id;
  };

  // Exact vector areas so that every cell closes under Gauss and constant
  // fields are advected to exactly zero by the upwind operator.
  auto int_sqrt1mc2 = [](double c) {  // antiderivative of sqrt(1-c^2)
    return 0.5 * (c * std::sqrt(std::max(0.0, 1.0 - c * c)) + std::asin(std::clamp(c, -1.0, 1.0)));
  };

  // radial faces (incl. wall at r_inner, far field at r_far)
  for (int ir = 0; ir <= nr; ++ir) {
    const double r = m.r_edges_[ir];
    for (int it = 0; it < ntheta; ++it) {
      const double c0 = m.costh_edges_[it], c1 = m.costh_edges_[it + 1];
      const double thc = std::acos(0.5 * (c0 + c1));
      const double isc = int_sqrt1mc2(c0) - int_sqrt1mc2(c1);
      for (int ip = 0; ip < nphi; ++ip) {
        const double pa = m.phi_edges_[ip], pb = m.phi_edges_[ip + 1];
        const double phc = 0.5 * (pa + pb);
        Vec3 va;
        va[0] = r * r * isc * (std::sin(pb) - std::sin(pa));
        va[1] = r * r * isc * (std::cos(pa) - std::cos(pb));
        va[2] = r * r * 0.5 * (c0 * c0 - c1 * c1) * (pb - pa);
        Face f;
        f.center = r * radial_unit(thc, phc);
        if (ir == 0) {
          // wall face: normal flipped to point out of the flow domain
          f.cell_in = m.cell_index(0, it, ip);
          f.type = FaceType::wall;
          va = -va;
        } else if (ir == nr) {
          f.cell_in = m.cell_index(nr - 1, it, ip);
          f.type = FaceType::far_field;
        } else {
          f.cell_in = m.cell_index(ir - 1, it, ip);
          f.cell_out = m.cell_index(ir, it, ip);
        }
        add_face(f, va);
      }
    }
  }

  // theta faces between bands, oriented toward increasing theta
  for (int ir = 0; ir < nr; ++ir) {
    const double r0 = m.r_edges_[ir], r1 = m.r_edges_[ir + 1];
    const double rfac = 0.5 * (r1 * r1 - r0 * r0);
    for (int it = 1; it < ntheta; ++it) {
      const double cth = m.costh_edges_[it];
      const double th = std::acos(cth);
      const double sth = std::sin(th);
      if (sth < 1e-14) continue;
      for (int ip = 0; ip < nphi; ++ip) {
        const double pa = m.phi_edges_[ip], pb = m.phi_edges_[ip + 1];
        const double phc = 0.5 * (pa + pb);
        Vec3 va;
        va[0] = rfac * sth * cth * (std::sin(pb) - std::sin(pa));
        va[1] = rfac * sth * cth * (std::cos(pa) - std::cos(pb));
        va[2] = -rfac * sth * sth * (pb - pa);
        Face f;
        f.center = 0.5 * (r0 + r1) * radial_unit(th, phc);
        f.cell_in = m.cell_index(ir, it - 1, ip);
        f.cell_out = m.cell_index(ir, it, ip);
        add_face(f, va);
      }
    }
  }

  // phi faces (periodic, exactly flat)
  for (int ir = 0; ir < nr; ++ir) {
    const double r0 = m.r_edges_[ir], r1 = m.r_edges_[ir + 1];
    const double rfac = 0.5 * (r1 * r1 - r0 * r0);
    for (int it = 0; it < ntheta; ++it) {
      const double c0 = m.costh_edges_[it], c1 = m.costh_edges_[it + 1];
      const double th0 = std::acos(c0), th1 = std::acos(c1);
      const double thc = std::acos(0.5 * (c0 + c1));
      for (int ip = 0; ip < nphi; ++ip) {
        const double ph = m.phi_edges_[ip + 1];
        Vec3 va = rfac * (th1 - th0) * phi_unit(ph);
        Face f;
        f.center = 0.5 * (r0 + r1) * radial_unit(thc, ph);
        f.cell_in = m.cell_index(ir, it, ip);
        f.cell_out = m.cell_index(ir, it, (ip + 1) % nphi);
        add_face(f, va);
      }
    }
  }

  return m;
}

void SpatialMesh::cell_coords(int c, int& ir, int& it, int& ip) const {
  ip = c % nph_;
  it = (c / nph_) % nth_;
  ir = c / (nph_ * nth_);
}

double SpatialMesh::total_volume() const {
  double v = 0;
  for (double x : volumes_) v += x;
  return v;
}

Eigen::MatrixXd SpatialMesh::gradient(const Eigen::VectorXd& field) const {
  if (field.size() != n_cells()) throw ConfigError("gradient: field size mismatch");
  Eigen::MatrixXd g(3, n_cells());
  for (int c = 0; c < n_cells(); ++c) {
    int ir, it, ip;
    cell_coords(c, ir, it, ip);
    const Vec3& x = centers_[c];
    const double r = x.norm();
    const double th = std::acos(x[2] / r);
    const double ph = std::atan2(x[1], x[0]);

    // radial derivative (one-sided at the boundary shells)
    double dfr;
    if (ir == 0) {
      dfr = (field[cell_index(1, it, ip)] - field[c]) /
            (centers_[cell_index(1, it, ip)].norm() - r);
    } else if (ir == nr_ - 1) {
      dfr = (field[c] - field[cell_index(nr_ - 2, it, ip)]) /
            (r - centers_[cell_index(nr_ - 2, it, ip)].norm());
    } else {
      const int cm = cell_index(ir - 1, it, ip), cp = cell_index(ir + 1, it, ip);
      dfr = (field[cp] - field[cm]) / (centers_[cp].norm() - centers_[cm].norm());
    }

    // theta derivative (one-sided at polar bands); angular coordinate is the
    // band-center theta value
    auto theta_of = [this](int band) {
      return std::acos(0.5 * (costh_edges_[band] + costh_edges_[band + 1]));
    };
    double dft;
    if (it == 0) {
      dft = (field[cell_index(ir, 1, ip)] - field[c]) / (theta_of(1) - theta_of(0));
    } else if (it == nth_ - 1) {
      dft = (field[c] - field[cell_index(ir, nth_ - 2, ip)]) /
            (theta_of(nth_ - 1) - theta_of(nth_ - 2));
    } else {
      dft = (field[cell_index(ir, it + 1, ip)] - field[cell_index(ir, it - 1, ip)]) /
            (theta_of(it + 1) - theta_of(it - 1));
    }

    // phi derivative, periodic
    const double dphi = 2.0 * kPi / nph_;
    const int pm = (ip + nph_ - 1) % nph_, pp = (ip + 1) % nph_;
    const double dfp =
        (field[cell_index(ir, it, pp)] - field[cell_index(ir, it, pm)]) / (2.0 * dphi);

    const Vec3 er = radial_unit(th, ph), et = theta_unit(th, ph), ep = phi_unit(ph);
    const double sth = std::max(std::sin(th), 1e-12);
    g.col(c) = er * dfr + et * (dft / r) + ep * (dfp / (r * sth));
  }
  return g;
}

std::uint64_t SpatialMesh::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(nr_);
  mix(nth_);
  mix(nph_);
  std::uint64_t bits;
  std::memcpy(&bits, &r_inner_, sizeof(bits));
  mix(bits);
  std::memcpy(&bits, &r_far_, sizeof(bits));
  mix(bits);
  return h;
}

}  // namespace exkin
