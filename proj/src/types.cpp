#include "insulate/types.hpp"

#include <algorithm>
#include <queue>

namespace ins {

namespace {

bool mask_cell_on(const GridField& m, int i, int j) { return m.at(i, j) > 0.5; }

// 4-connectivity component count of the on-cells.
int mask_component_count(const GridField& m) {
  std::vector<char> seen(m.values.size(), 0);
  int comps = 0;
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      size_t idx = static_cast<size_t>(j) * m.nx + i;
      if (seen[idx] || !mask_cell_on(m, i, j)) continue;
      ++comps;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      seen[idx] = 1;
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int ni = ci + di[d], nj = cj + dj[d];
          if (ni < 0 || nj < 0 || ni >= m.nx || nj >= m.ny) continue;
          size_t nidx = static_cast<size_t>(nj) * m.nx + ni;
          if (!seen[nidx] && mask_cell_on(m, ni, nj)) {
            seen[nidx] = 1;
            q.push({ni, nj});
          }
        }
      }
    }
  }
  return comps;
}

}  // namespace

bool OmegaSpec::inside(double x, double y) const {
  switch (variant) {
    case Variant::Disk: {
      const double ddx = x - center.x, ddy = y - center.y;
      return ddx * ddx + ddy * ddy < radius * radius;
    }
    case Variant::Star: {
      const double ddx = x - center.x, ddy = y - center.y;
      const double r = std::sqrt(ddx * ddx + ddy * ddy);
      if (r == 0.0) return true;
      const double theta = std::atan2(ddy, ddx);
      return r < star.radius(theta);
    }
    case Variant::Disks: {
      for (const auto& [c, r] : disks) {
        const double ddx = x - c.x, ddy = y - c.y;
        if (ddx * ddx + ddy * ddy < r * r) return true;
      }
      return false;
    }
    case Variant::GridMask: {
      if (x < mask.x0 || y < mask.y0 || x >= mask.x0 + mask.width() || y >= mask.y0 + mask.height())
        return false;
      int i = static_cast<int>((x - mask.x0) / mask.dx);
      int j = static_cast<int>((y - mask.y0) / mask.dy);
      i = std::clamp(i, 0, mask.nx - 1);
      j = std::clamp(j, 0, mask.ny - 1);
      return mask_cell_on(mask, i, j);
    }
  }
  return false;
}

double OmegaSpec::boundary_radius(double theta) const {
  switch (variant) {
    case Variant::Disk:
      return radius;
    case Variant::Star:
      return star.radius(theta);
    default:
      throw PreconditionError("OmegaSpec: boundary_radius requires a star-shaped Omega (disk or star)");
  }
}

double OmegaSpec::boundary_radius_d1(double theta) const {
  switch (variant) {
    case Variant::Disk:
      return 0.0;
    case Variant::Star:
      return star.radius_d1(theta);
    default:
      throw PreconditionError("OmegaSpec: boundary_radius requires a star-shaped Omega (disk or star)");
  }
}

double OmegaSpec::boundary_length() const {
  switch (variant) {
    case Variant::Disk:
      return kTwoPi * radius;
    case Variant::Star: {
      const int n = 4096;
      double len = 0.0;
      for (int j = 0; j < n; ++j) {
        const double th = kTwoPi * j / n;
        const double r = star.radius(th), r1 = star.radius_d1(th);
        len += std::sqrt(r * r + r1 * r1);
      }
      return len * kTwoPi / n;
    }
    case Variant::Disks: {
      double len = 0.0;
      for (const auto& [c, r] : disks) len += kTwoPi * r;
      return len;
    }
    case Variant::GridMask: {
      // Face-counting (l1) boundary length; exterior of the grid counts as off.
      double len = 0.0;
      for (int j = 0; j < mask.ny; ++j) {
        for (int i = 0; i < mask.nx; ++i) {
          if (!mask_cell_on(mask, i, j)) continue;
          auto off = [&](int ii, int jj) {
            return ii < 0 || jj < 0 || ii >= mask.nx || jj >= mask.ny || !mask_cell_on(mask, ii, jj);
          };
          if (off(i + 1, j)) len += mask.dy;
          if (off(i - 1, j)) len += mask.dy;
          if (off(i, j + 1)) len += mask.dx;
          if (off(i, j - 1)) len += mask.dx;
        }
      }
      return len;
    }
  }
  return 0.0;
}

double OmegaSpec::area() const {
  switch (variant) {
    case Variant::Disk:
      return kPi * radius * radius;
    case Variant::Star: {
      const int n = 4096;
      double a = 0.0;
      for (int j = 0; j < n; ++j) {
        const double r = star.radius(kTwoPi * j / n);
        a += 0.5 * r * r;
      }
      return a * kTwoPi / n;
    }
    case Variant::Disks: {
      double a = 0.0;
      for (const auto& [c, r] : disks) a += kPi * r * r;
      return a;
    }
    case Variant::GridMask: {
      double a = 0.0;
      for (double v : mask.values)
        if (v > 0.5) a += mask.cell_area();
      return a;
    }
  }
  return 0.0;
}

double OmegaSpec::min_radius() const {
  switch (variant) {
    case Variant::Disk:
      return radius;
    case Variant::Star: {
      const int n = 4096;
      double m = star.radius(0.0);
      for (int j = 1; j < n; ++j) m = std::min(m, star.radius(kTwoPi * j / n));
      return m;
    }
    case Variant::Disks: {
      double m = disks.empty() ? 0.0 : disks.front().second;
      for (const auto& [c, r] : disks) m = std::min(m, r);
      return m;
    }
    case Variant::GridMask:
      return 0.5 * std::min(mask.dx, mask.dy);
  }
  return 0.0;
}

void OmegaSpec::validate() const {
  switch (variant) {
    case Variant::Disk:
      if (!(radius > 0.0)) throw PreconditionError("OmegaSpec: disk radius must be positive");
      break;
    case Variant::Star: {
      const int n = 4096;
      for (int j = 0; j < n; ++j)
        if (!(star.radius(kTwoPi * j / n) > 0.0))
          throw PreconditionError("OmegaSpec: star radius function must be strictly positive");
      break;
    }
    case Variant::Disks: {
      if (disks.empty()) throw PreconditionError("OmegaSpec: disks variant needs at least one disk");
      for (const auto& [c, r] : disks)
        if (!(r > 0.0)) throw PreconditionError("OmegaSpec: disk radius must be positive");
      for (size_t a = 0; a < disks.size(); ++a)
        for (size_t b = a + 1; b < disks.size(); ++b) {
          const double ddx = disks[a].first.x - disks[b].first.x;
          const double ddy = disks[a].first.y - disks[b].first.y;
          if (std::sqrt(ddx * ddx + ddy * ddy) <= disks[a].second + disks[b].second)
            throw PreconditionError("OmegaSpec: disks must be pairwise disjoint");
        }
      break;
    }
    case Variant::GridMask: {
      if (mask.values.empty()) throw PreconditionError("OmegaSpec: grid mask is empty");
      bool any = false;
      for (double v : mask.values)
        if (v > 0.5) any = true;
      if (!any) throw PreconditionError("OmegaSpec: grid mask has no cells set");
      // The mask may have several components (e.g. a body plus an inclusion);
      // downstream star-shaped solvers reject those themselves.
      (void)mask_component_count(mask);
      break;
    }
  }
}

}  // namespace ins
