#include "insulate/analysis.hpp"

#include <algorithm>
#include <limits>

namespace ins {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Orientation predicate on integer cell indices (exact).
long long cross(const std::pair<int, int>& o, const std::pair<int, int>& a,
                const std::pair<int, int>& b) {
  const long long ax = a.first - o.first, ay = a.second - o.second;
  const long long bx = b.first - o.first, by = b.second - o.second;
  return ax * by - ay * bx;
}

// Andrew monotone chain on integer points; returns hull CCW without repeats.
std::vector<std::pair<int, int>> convex_hull(std::vector<std::pair<int, int>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  std::vector<std::pair<int, int>> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_hull(const std::vector<std::pair<int, int>>& hull, std::pair<int, int> p) {
  const int n = static_cast<int>(hull.size());
  if (n == 0) return false;
  if (n == 1) return hull[0] == p;
  if (n == 2) {
    // collinear segment: p must lie on it
    if (cross(hull[0], hull[1], p) != 0) return false;
    return std::min(hull[0], hull[1]) <= p && p <= std::max(hull[0], hull[1]);
  }
  for (int i = 0; i < n; ++i)
    if (cross(hull[i], hull[(i + 1) % n], p) < 0) return false;
  return true;
}

// Cells of the hull's pixelization (centers inside or on the hull).
long long hull_pixel_count(const std::vector<std::pair<int, int>>& cells) {
  const auto hull = convex_hull(cells);
  int imin = cells[0].first, imax = cells[0].first;
  int jmin = cells[0].second, jmax = cells[0].second;
  for (const auto& c : cells) {
    imin = std::min(imin, c.first);
    imax = std::max(imax, c.first);
    jmin = std::min(jmin, c.second);
    jmax = std::max(jmax, c.second);
  }
  long long count = 0;
  for (int j = jmin; j <= jmax; ++j)
    for (int i = imin; i <= imax; ++i)
      if (inside_hull(hull, {i, j})) ++count;
  return count;
}

}  // namespace

bool pixel_convex(const std::vector<std::pair<int, int>>& cells) {
  if (cells.empty()) return false;
  return hull_pixel_count(cells) == static_cast<long long>(cells.size());
}

LowerBoundReport check_lower_bound(const GridField& u, double delta_cut) {
  if (!(delta_cut > 0.0 && delta_cut < 1.0))
    throw PreconditionError("check_lower_bound: delta_cut must lie in (0,1)");
  LowerBoundReport rep;

  double dmin = std::numeric_limits<double>::infinity();
  long long positives = 0;
  for (double v : u.values)
    if (v > delta_cut) {
      dmin = std::min(dmin, v);
      ++positives;
    }
  if (positives == 0) {
    rep.empty = true;
    rep.delta_obs = kNaN;
    return rep;
  }
  rep.delta_obs = dmin;

  long long gap_cells = 0;
  for (double v : u.values)
    if (v > delta_cut && v < 0.9 * rep.delta_obs) ++gap_cells;
  const double domain_area = u.width() * u.height();
  rep.gap_mass = gap_cells * u.cell_area() / domain_area;

  // halo budget: one grid cell of smear along the positive set's perimeter
  double perim = 0.0;
  auto pos = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < u.nx && j < u.ny && u.at(i, j) > delta_cut;
  };
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i)
      if (pos(i, j)) {
        if (!pos(i + 1, j)) perim += u.dy;
        if (!pos(i - 1, j)) perim += u.dy;
        if (!pos(i, j + 1)) perim += u.dx;
        if (!pos(i, j - 1)) perim += u.dx;
      }
  rep.halo_budget = perim * std::max(u.dx, u.dy) / domain_area;
  rep.violation = rep.gap_mass > rep.halo_budget;
  return rep;
}

DensityReport density_profile(const std::vector<JumpFace>& k_faces, const GridField& grid,
                              const std::vector<Point>& points, const std::vector<double>& radii) {
  for (double r : radii)
    if (r < 4.0 * std::max(grid.dx, grid.dy))
      throw PreconditionError("density_profile: radii must be >= 4 dx");

  DensityReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (const Point& p : points) {
    for (double r : radii) {
      DensityEntry e;
      e.point = p;
      e.r = r;
      if (p.x - r < grid.x0 || p.y - r < grid.y0 || p.x + r > grid.x0 + grid.width() ||
          p.y + r > grid.y0 + grid.height()) {
        e.skipped = true;
        ++rep.n_skipped;
        rep.entries.push_back(e);
        continue;
      }
      double len = 0.0;
      for (const JumpFace& f : k_faces) {
        const double ddx = f.mid_x - p.x, ddy = f.mid_y - p.y;
        if (ddx * ddx + ddy * ddy <= r * r) len += f.length;
      }
      e.ratio = len / r;  // n = 2
      rep.min_ratio = std::min(rep.min_ratio, e.ratio);
      rep.max_ratio = std::max(rep.max_ratio, e.ratio);
      rep.entries.push_back(e);
    }
  }
  return rep;
}

BlowupReport blowup_scan(const GridField& u, const std::vector<JumpFace>& k_faces, Point point,
                         std::vector<double> radii, double tau, double eps_flat) {
  BlowupReport rep;
  rep.point = point;
  std::sort(radii.begin(), radii.end(), std::greater<>());
  const double dh = std::max(u.dx, u.dy);
  for (double r : radii)
    if (r < 2.0 * dh) throw PreconditionError("blowup_scan: radii must be >= 2 dx");
  rep.radii = radii;

  bool resolved = true;
  for (double r : radii)
    if (point.x - r < u.x0 || point.y - r < u.y0 || point.x + r > u.x0 + u.width() ||
        point.y + r > u.y0 + u.height())
      resolved = false;

  // Dirichlet quadrature restricted to B_r by face midpoint, excluding both
  // threshold-detected jumps and the supplied K faces (near a crack tip the
  // jump amplitude drops below any fixed tau); e_r = r^{1-n} * integral.
  std::vector<char> is_k(static_cast<size_t>(2) * u.nx * u.ny, 0);
  auto face_id = [&](int i, int j, bool xdir) {
    return (xdir ? 0 : static_cast<size_t>(u.nx) * u.ny) + static_cast<size_t>(j) * u.nx + i;
  };
  for (const JumpFace& f : k_faces) is_k[face_id(f.i1, f.j1, f.j1 == f.j2)] = 1;

  const double area = u.cell_area();
  auto dirichlet_in = [&](double r) {
    double sum = 0.0;
    auto face = [&](int i, int j, bool xdir, double a, double b, double mx, double my, double dhf) {
      if (std::fabs(b - a) > tau || is_k[face_id(i, j, xdir)]) return;
      const double ddx = mx - point.x, ddy = my - point.y;
      if (ddx * ddx + ddy * ddy > r * r) return;
      const double g = (b - a) / dhf;
      sum += g * g * area;
    };
    for (int j = 0; j < u.ny; ++j)
      for (int i = 0; i + 1 < u.nx; ++i)
        face(i, j, true, u.at(i, j), u.at(i + 1, j), u.x0 + (i + 1) * u.dx, u.cell_y(j), u.dx);
    for (int j = 0; j + 1 < u.ny; ++j)
      for (int i = 0; i < u.nx; ++i)
        face(i, j, false, u.at(i, j), u.at(i, j + 1), u.cell_x(i), u.y0 + (j + 1) * u.dy, u.dy);
    return sum;
  };

  // Slab half-width of the K points in B_r, minimized over the normal
  // direction: 8 sampled directions plus golden-section refinement.
  auto flatness_in = [&](double r) {
    std::vector<Point> pts;
    for (const JumpFace& f : k_faces) {
      const double ddx = f.mid_x - point.x, ddy = f.mid_y - point.y;
      if (ddx * ddx + ddy * ddy <= r * r) pts.push_back({ddx, ddy});
    }
    if (pts.size() < 2) return 0.0;
    auto width = [&](double phi) {
      const double nx = std::cos(phi), ny = std::sin(phi);
      double lo = 1e300, hi = -1e300;
      for (const Point& q : pts) {
        const double d = q.x * nx + q.y * ny;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      return hi - lo;
    };
    double best_phi = 0.0, best = width(0.0);
    for (int k = 1; k < 8; ++k) {
      const double phi = kPi * k / 8.0;
      const double wk = width(phi);
      if (wk < best) {
        best = wk;
        best_phi = phi;
      }
    }
    double a = best_phi - kPi / 8.0, b = best_phi + kPi / 8.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = width(x1), f2 = width(x2);
    for (int it = 0; it < 48; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = width(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = width(x2);
      }
    }
    return 0.5 * std::min(best, std::min(f1, f2)) / r;
  };

  for (double r : radii) {
    rep.e_r.push_back(dirichlet_in(r) / r);
    rep.flatness.push_back(flatness_in(r));
  }

  if (!resolved || radii.size() < 2) {
    rep.classification = BlowupReport::Class::Unresolved;
    return rep;
  }

  double e_max = 0.0, e_min = std::numeric_limits<double>::infinity();
  for (double e : rep.e_r) {
    e_max = std::max(e_max, e);
    e_min = std::min(e_min, e);
  }
  rep.zeta_obs = e_min;

  bool non_increasing = true;  // along the decreasing-radius sequence
  for (size_t k = 1; k < rep.e_r.size(); ++k)
    if (rep.e_r[k] > rep.e_r[k - 1] * 1.05 + 1e-12) non_increasing = false;
  const bool decays = rep.e_r.back() <= 0.7 * rep.e_r.front() || rep.e_r.back() <= 1e-9 * std::max(e_max, 1e-30) ||
                      e_max == 0.0;
  const bool flat_enough = rep.flatness.back() <= eps_flat;

  if (non_increasing && decays && flat_enough)
    rep.classification = BlowupReport::Class::FlatCandidate;
  else if (e_min > 0.0 && e_min >= 0.25 * e_max)
    rep.classification = BlowupReport::Class::SingularCandidate;
  else
    rep.classification = BlowupReport::Class::Unresolved;
  return rep;
}

double el_residual(const StateSolution& state, const StarShape& shape, const ProblemConfig& cfg,
                   bool converged) {
  if (!converged)
    throw PreconditionError("el_residual: refusing a non-converged optimizer state");
  const std::vector<double> g = stationarity_density(state, shape, cfg);
  double s = 0.0;
  for (double v : g) s = std::max(s, std::fabs(v));
  return s;
}

std::vector<HoleReport> hole_geometry(const std::vector<int>& labels, int n_components,
                                      const GridField& grid, const GridField* k_mask) {
  if (labels.size() != grid.values.size())
    throw PreconditionError("hole_geometry: label field does not match the grid");

  std::vector<HoleReport> out;
  for (int comp = 0; comp < n_components; ++comp) {
    HoleReport rep;
    rep.component = comp;
    std::vector<std::pair<int, int>> cells;
    bool touches_boundary = false;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        if (labels[static_cast<size_t>(j) * grid.nx + i] == comp) {
          cells.push_back({i, j});
          if (i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1) touches_boundary = true;
        }
    if (cells.empty()) continue;
    if (touches_boundary) {
      rep.skipped = true;
      out.push_back(rep);
      continue;
    }

    rep.area = static_cast<double>(cells.size()) * grid.cell_area();

    auto in_comp = [&](int i, int j) {
      return i >= 0 && j >= 0 && i < grid.nx && j < grid.ny &&
             labels[static_cast<size_t>(j) * grid.nx + i] == comp;
    };
    double perim = 0.0;
    for (const auto& [i, j] : cells) {
      if (!in_comp(i + 1, j)) perim += grid.dy;
      if (!in_comp(i - 1, j)) perim += grid.dy;
      if (!in_comp(i, j + 1)) perim += grid.dx;
      if (!in_comp(i, j - 1)) perim += grid.dx;
    }
    rep.perimeter = perim;

    rep.convexity_defect =
        static_cast<double>(hull_pixel_count(cells)) / static_cast<double>(cells.size()) - 1.0;

    // min over 8 directions of the projection width of the cell centers
    double min_width = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 8; ++k) {
      const double phi = kPi * k / 8.0;
      const double nx = std::cos(phi), ny = std::sin(phi);
      double lo = 1e300, hi = -1e300;
      for (const auto& [i, j] : cells) {
        const double d = grid.cell_x(i) * nx + grid.cell_y(j) * ny;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      min_width = std::min(min_width, hi - lo);
    }
    rep.roundness = min_width / perim;

    if (k_mask != nullptr) {
      // K cells not adjacent to this hole (its own boundary ring excluded)
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
          if (k_mask->at(i, j) < 0.5) continue;
          if (in_comp(i + 1, j) || in_comp(i - 1, j) || in_comp(i, j + 1) || in_comp(i, j - 1) ||
              in_comp(i, j))
            continue;
          for (const auto& [ci, cj] : cells) {
            const double ddx = (ci - i) * grid.dx, ddy = (cj - j) * grid.dy;
            best = std::min(best, std::sqrt(ddx * ddx + ddy * ddy));
          }
        }
      rep.separation_ratio = std::isfinite(best) ? best / perim : kNaN;
    } else {
      rep.separation_ratio = kNaN;
    }
    out.push_back(rep);
  }
  return out;
}

}  // namespace ins
