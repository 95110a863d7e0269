#include "insulate/model.hpp"

#include <algorithm>

namespace ins {

namespace {

struct BBox {
  double x_min, x_max, y_min, y_max;
};

BBox omega_bbox(const OmegaSpec& o) {
  switch (o.variant) {
    case OmegaSpec::Variant::Disk:
      return {o.center.x - o.radius, o.center.x + o.radius, o.center.y - o.radius,
              o.center.y + o.radius};
    case OmegaSpec::Variant::Star: {
      double rmax = 0.0;
      for (int j = 0; j < 1024; ++j) rmax = std::max(rmax, o.star.radius(kTwoPi * j / 1024));
      return {o.center.x - rmax, o.center.x + rmax, o.center.y - rmax, o.center.y + rmax};
    }
    case OmegaSpec::Variant::Disks: {
      BBox b{1e300, -1e300, 1e300, -1e300};
      for (const auto& [c, r] : o.disks) {
        b.x_min = std::min(b.x_min, c.x - r);
        b.x_max = std::max(b.x_max, c.x + r);
        b.y_min = std::min(b.y_min, c.y - r);
        b.y_max = std::max(b.y_max, c.y + r);
      }
      return b;
    }
    case OmegaSpec::Variant::GridMask:
      return {o.mask.x0, o.mask.x0 + o.mask.width(), o.mask.y0, o.mask.y0 + o.mask.height()};
  }
  return {0, 0, 0, 0};
}

double q_weight(double u) { return 2.0 * u * u; }

}  // namespace

void require_grid_covers_omega(const GridField& u, const OmegaSpec& omega) {
  const BBox b = omega_bbox(omega);
  if (b.x_min < u.x0 || b.y_min < u.y0 || b.x_max > u.x0 + u.width() ||
      b.y_max > u.y0 + u.height())
    throw PreconditionError("grid does not cover Omega's bounding box");
}

GridField omega_mask(int nx, int ny, double x0, double y0, double dx, double dy,
                     const OmegaSpec& omega) {
  GridField m(nx, ny, x0, y0, dx, dy, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (omega.inside(m.cell_x(i), m.cell_y(j))) m.at(i, j) = 1.0;
  return m;
}

std::vector<JumpFace> detect_jump_faces(const GridField& u, double tau) {
  std::vector<JumpFace> faces;
  for (int j = 0; j < u.ny; ++j) {
    for (int i = 0; i + 1 < u.nx; ++i) {
      const double a = u.at(i, j), b = u.at(i + 1, j);
      if (std::fabs(b - a) > tau)
        faces.push_back({i, j, i + 1, j, u.x0 + (i + 1) * u.dx, u.cell_y(j), u.dy, a, b});
    }
  }
  for (int j = 0; j + 1 < u.ny; ++j) {
    for (int i = 0; i < u.nx; ++i) {
      const double a = u.at(i, j), b = u.at(i, j + 1);
      if (std::fabs(b - a) > tau)
        faces.push_back({i, j, i, j + 1, u.cell_x(i), u.y0 + (j + 1) * u.dy, u.dx, a, b});
    }
  }
  return faces;
}

EnergyBreakdown energy_sbv(const GridField& u, const ProblemConfig& cfg, const SBVParams& p) {
  p.validate();
  if (!u.finite()) throw PreconditionError("energy_sbv: field contains non-finite values");
  require_grid_covers_omega(u, cfg.omega);

  const double tau = p.jump_threshold;
  const double area = u.cell_area();
  double dirichlet = 0.0, surface = 0.0, volume = 0.0;

  for (int j = 0; j < u.ny; ++j) {
    for (int i = 0; i + 1 < u.nx; ++i) {
      const double a = u.at(i, j), b = u.at(i + 1, j);
      const double d = b - a;
      if (std::fabs(d) > tau)
        surface += cfg.robin_h * (a * a + b * b) * u.dy;
      else
        dirichlet += (d / u.dx) * (d / u.dx) * area;
    }
  }
  for (int j = 0; j + 1 < u.ny; ++j) {
    for (int i = 0; i < u.nx; ++i) {
      const double a = u.at(i, j), b = u.at(i, j + 1);
      const double d = b - a;
      if (std::fabs(d) > tau)
        surface += cfg.robin_h * (a * a + b * b) * u.dx;
      else
        dirichlet += (d / u.dy) * (d / u.dy) * area;
    }
  }
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i)
      if (u.at(i, j) > p.positivity_cut && !cfg.omega.inside(u.cell_x(i), u.cell_y(j)))
        volume += cfg.volume_cost * area;

  return EnergyBreakdown::make(dirichlet, surface, volume);
}

EnergyBreakdown energy_sharp(const StateSolution& st, const StarShape& shape,
                             const ProblemConfig& cfg) {
  if (st.n_s < 3 || st.n_theta < 4) throw PreconditionError("energy_sharp: mesh too small");
  // The state must have been solved on this shape: compare sampled radii.
  for (int j = 0; j < st.n_theta; ++j) {
    const double th = kTwoPi * j / st.n_theta;
    if (std::fabs(shape.radius(th) - st.ra[j]) > 1e-12 * (1.0 + std::fabs(st.ra[j])) ||
        std::fabs(shape.center.x - st.center.x) > 1e-15 ||
        std::fabs(shape.center.y - st.center.y) > 1e-15)
      throw PreconditionError("energy_sharp: state was solved on a different shape");
  }

  const int ns = st.n_s, nt = st.n_theta;
  const double dsm = st.ds(), dth = st.dtheta();

  auto uval = [&](int i, int j) { return st.at(i, ((j % nt) + nt) % nt); };

  double dirichlet = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double wi = (i == 0 || i == ns - 1) ? 0.5 : 1.0;  // trapezoid in s
    const double s = i * dsm;
    for (int j = 0; j < nt; ++j) {
      const double th = kTwoPi * j / nt;
      const double t = st.ra[j] - st.rho[j];
      const double r = st.rho[j] + s * t;
      const double rth = st.rho1[j] + s * (st.ra1[j] - st.rho1[j]);

      double us;
      if (i == 0)
        us = (-3.0 * uval(0, j) + 4.0 * uval(1, j) - uval(2, j)) / (2.0 * dsm);
      else if (i == ns - 1)
        us = (3.0 * uval(ns - 1, j) - 4.0 * uval(ns - 2, j) + uval(ns - 3, j)) / (2.0 * dsm);
      else
        us = (uval(i + 1, j) - uval(i - 1, j)) / (2.0 * dsm);
      const double uth = (uval(i, j + 1) - uval(i, j - 1)) / (2.0 * dth);

      // |grad u|^2 = g^ss u_s^2 + 2 g^st u_s u_t + g^tt u_t^2, sqrt(g) = t r.
      const double gss = (rth * rth + r * r) / (t * t * r * r);
      const double gst = -rth / (t * r * r);
      const double gtt = 1.0 / (r * r);
      const double integrand = gss * us * us + 2.0 * gst * us * uth + gtt * uth * uth;
      dirichlet += wi * integrand * t * r * dsm * dth;
    }
  }

  double surface = 0.0, vol = 0.0;
  for (int j = 0; j < nt; ++j) {
    const double tr = st.trace_outer[j];
    surface += tr * tr * std::sqrt(st.ra[j] * st.ra[j] + st.ra1[j] * st.ra1[j]) * dth;
    vol += 0.5 * (st.ra[j] * st.ra[j] - st.rho[j] * st.rho[j]) * dth;
  }
  surface *= cfg.robin_h;
  vol *= cfg.volume_cost;

  return EnergyBreakdown::make(dirichlet, surface, vol);
}

EnergyBreakdown energy_phase_field(const GridField& u, const GridField& z, double eps,
                                   const ProblemConfig& cfg, const PFParams& p) {
  if (u.nx != z.nx || u.ny != z.ny || u.dx != z.dx || u.dy != z.dy || u.x0 != z.x0 ||
      u.y0 != z.y0)
    throw PreconditionError("energy_phase_field: u and z must live on the same grid");
  if (!(eps > 0.0)) throw PreconditionError("energy_phase_field: eps must be positive");

  const double area = u.cell_area();
  double dirichlet = 0.0, surf_grad = 0.0, surf_react = 0.0, volume = 0.0;

  // Face terms: (avg(z^2) + k_eps)|du|^2 and eps * avg(q(u)) |dz|^2.
  auto face = [&](double ua, double ub, double za, double zb, double dh) {
    const double du = (ub - ua) / dh;
    const double dz = (zb - za) / dh;
    const double zc = 0.5 * (za * za + zb * zb) + p.k_eps;
    const double qf = 0.5 * (q_weight(ua) + q_weight(ub));
    dirichlet += zc * du * du * area;
    surf_grad += eps * qf * dz * dz * area;
  };
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i + 1 < u.nx; ++i)
      face(u.at(i, j), u.at(i + 1, j), z.at(i, j), z.at(i + 1, j), u.dx);
  for (int j = 0; j + 1 < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i)
      face(u.at(i, j), u.at(i, j + 1), z.at(i, j), z.at(i, j + 1), u.dy);

  for (int j = 0; j < u.ny; ++j) {
    for (int i = 0; i < u.nx; ++i) {
      const double zc = z.at(i, j);
      surf_react += (q_weight(u.at(i, j)) + p.reaction_floor) * (1.0 - zc) * (1.0 - zc) /
                    (4.0 * eps) * area;
      if (!cfg.omega.inside(u.cell_x(i), u.cell_y(j)))
        volume += std::clamp(u.at(i, j) / p.delta_cut, 0.0, 1.0) * area;
    }
  }

  const double surface = cfg.robin_h * p.w_mult * (surf_grad + surf_react);
  return EnergyBreakdown::make(dirichlet, surface, cfg.volume_cost * volume);
}

}  // namespace ins
