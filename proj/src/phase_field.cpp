#include "insulate/phase_field.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <queue>
#include <random>

#include "insulate/model.hpp"
#include "insulate/radial.hpp"

namespace ins {

namespace {

double q_weight(double u) { return 2.0 * u * u; }

// 4-connected component labeling of an arbitrary cell predicate.
int label_components(int nx, int ny, const std::vector<char>& in_set, std::vector<int>& labels) {
  labels.assign(in_set.size(), -1);
  int next = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const size_t idx = static_cast<size_t>(j) * nx + i;
      if (!in_set[idx] || labels[idx] >= 0) continue;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      labels[idx] = next;
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop();
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ni = ci + di[d], nj = cj + dj[d];
          if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
          const size_t nidx = static_cast<size_t>(nj) * nx + ni;
          if (in_set[nidx] && labels[nidx] < 0) {
            labels[nidx] = next;
            q.push({ni, nj});
          }
        }
      }
      ++next;
    }
  return next;
}

// BFS grid distance (in cells) to the nearest Omega cell; used for seeding
// non-disk geometries.
std::vector<double> grid_distance_to(const GridField& mask) {
  const int nx = mask.nx, ny = mask.ny;
  std::vector<double> dist(mask.values.size(), 1e300);
  std::queue<std::pair<int, int>> q;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (mask.at(i, j) > 0.5) {
        dist[static_cast<size_t>(j) * nx + i] = 0.0;
        q.push({i, j});
      }
  while (!q.empty()) {
    auto [ci, cj] = q.front();
    q.pop();
    const size_t idx = static_cast<size_t>(cj) * nx + ci;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int ni = ci + di[d], nj = cj + dj[d];
      if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
      const size_t nidx = static_cast<size_t>(nj) * nx + ni;
      if (dist[nidx] > dist[idx] + 1.0) {
        dist[nidx] = dist[idx] + 1.0;
        q.push({ni, nj});
      }
    }
  }
  return dist;
}

struct AltSolvers {
  // u-step excludes the Omega-clamped cells; z-step covers every cell.
  std::vector<int> u_index;  // cell -> unknown id or -1 for clamped
  int n_u = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> lu_u, lu_z;
  bool analyzed_u = false, analyzed_z = false;
};

}  // namespace

GridField oracle_seed(const ProblemConfig& cfg, const GridSpec& grid) {
  GridField u = grid.make(0.0);
  const OmegaSpec& o = cfg.omega;

  if (o.variant == OmegaSpec::Variant::Disk || o.variant == OmegaSpec::Variant::Disks) {
    const Point c = (o.variant == OmegaSpec::Variant::Disk) ? o.center : o.disks.front().first;
    const double rho0 = (o.variant == OmegaSpec::Variant::Disk) ? o.radius : o.disks.front().second;
    RadialOptimum opt = optimize_radius(2, cfg.robin_h, cfg.volume_cost, rho0);
    RadialSolution prof = radial_profile(2, cfg.robin_h, rho0, opt.r_star);
    for (int j = 0; j < u.ny; ++j)
      for (int i = 0; i < u.nx; ++i) {
        const double ddx = u.cell_x(i) - c.x, ddy = u.cell_y(j) - c.y;
        const double r = std::sqrt(ddx * ddx + ddy * ddy);
        if (r <= rho0)
          u.at(i, j) = 1.0;
        else if (r < opt.r_star)
          u.at(i, j) = prof.u(r);
      }
    // clamp every Omega component (auxiliary disks included)
    for (int j = 0; j < u.ny; ++j)
      for (int i = 0; i < u.nx; ++i)
        if (o.inside(u.cell_x(i), u.cell_y(j))) u.at(i, j) = 1.0;
    return u;
  }

  // Non-disk Omega: radial profile in grid distance from Omega, thickness
  // from the equivalent-radius oracle.
  const GridField mask = omega_mask(grid.nx, grid.ny, grid.x0, grid.y0, grid.dx, grid.dy, o);
  const double rho_eq = std::sqrt(std::max(o.area(), grid.dx * grid.dy) / kPi);
  RadialOptimum opt = optimize_radius(2, cfg.robin_h, cfg.volume_cost, rho_eq);
  RadialSolution prof = radial_profile(2, cfg.robin_h, rho_eq, opt.r_star);
  const std::vector<double> dist = grid_distance_to(mask);
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i) {
      const double d = dist[static_cast<size_t>(j) * u.nx + i] * grid.dx;
      if (d == 0.0)
        u.at(i, j) = 1.0;
      else if (rho_eq + d < opt.r_star)
        u.at(i, j) = prof.u(rho_eq + d);
    }
  return u;
}

PhaseFieldResult at_minimize(const ProblemConfig& cfg, const GridSpec& grid, const PFParams& p,
                             uint64_t seed) {
  cfg.validate();
  p.validate();
  if (cfg.dim != 2) throw PreconditionError("at_minimize: phase-field solver requires dim = 2");

  const int nx = grid.nx, ny = grid.ny;
  const size_t ncells = static_cast<size_t>(nx) * ny;
  const double dA = grid.dx * grid.dy;
  const double h = cfg.robin_h, w = p.w_mult;

  GridField u = oracle_seed(cfg, grid);
  require_grid_covers_omega(u, cfg.omega);
  GridField z = grid.make(1.0);

  const GridField omask = omega_mask(nx, ny, grid.x0, grid.y0, grid.dx, grid.dy, cfg.omega);
  bool any_omega = false;
  for (double v : omask.values) any_omega |= v > 0.5;
  if (!any_omega) throw PreconditionError("at_minimize: grid resolves no Omega cell");

  if (p.noise_amp > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> un(-p.noise_amp, p.noise_amp);
    for (size_t c = 0; c < ncells; ++c)
      if (omask.values[c] < 0.5) u.values[c] = std::clamp(u.values[c] + un(rng), 0.0, 1.0);
  }

  AltSolvers slv;
  slv.u_index.assign(ncells, -1);
  for (size_t c = 0; c < ncells; ++c)
    if (omask.values[c] < 0.5) slv.u_index[c] = slv.n_u++;

  auto cell = [nx](int i, int j) { return static_cast<size_t>(j) * nx + i; };

  // Enumerate interior faces once: (cell a, cell b, spacing).
  struct Face {
    int a, b;
    double dh;
  };
  std::vector<Face> faces;
  faces.reserve(2 * ncells);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i)
      faces.push_back({static_cast<int>(cell(i, j)), static_cast<int>(cell(i + 1, j)), grid.dx});
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i)
      faces.push_back({static_cast<int>(cell(i, j)), static_cast<int>(cell(i, j + 1)), grid.dy});

  SBVParams sbv;
  sbv.jump_threshold = p.sbv_tau;
  sbv.positivity_cut = p.delta_cut;

  PhaseFieldResult res;
  res.seed = seed;

  auto f_eps_of = [&](const GridField& uu, const GridField& zz, double eps) {
    return energy_phase_field(uu, zz, eps, cfg, p).total;
  };

  // u-step: minimize the quadratic form in u with z and the lagged sigma'
  // fixed; solution clamped to [0,1].
  auto u_step = [&](double eps, const GridField& u_old) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(faces.size() * 4 + ncells);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(slv.n_u);
    std::vector<double> diag(slv.n_u, 0.0);

    for (const Face& f : faces) {
      const double za = z.values[f.a], zb = z.values[f.b];
      const double wf = (0.5 * (za * za + zb * zb) + p.k_eps) * dA / (f.dh * f.dh);
      const double dz = (z.values[f.b] - z.values[f.a]) / f.dh;
      const double rf = h * w * eps * dz * dz * dA;  // q-face reaction, per side
      const int ia = slv.u_index[f.a], ib = slv.u_index[f.b];
      if (ia >= 0) diag[ia] += wf + rf;
      if (ib >= 0) diag[ib] += wf + rf;
      if (ia >= 0 && ib >= 0) {
        trip.emplace_back(ia, ib, -wf);
        trip.emplace_back(ib, ia, -wf);
      } else if (ia >= 0) {
        rhs[ia] += wf * 1.0;  // clamped neighbor holds u = 1
      } else if (ib >= 0) {
        rhs[ib] += wf * 1.0;
      }
    }
    for (size_t c = 0; c < ncells; ++c) {
      const int ic = slv.u_index[c];
      if (ic < 0) continue;
      const double zc = z.values[c];
      diag[ic] += h * w * (1.0 - zc) * (1.0 - zc) / (2.0 * eps) * dA;
      const double sprime = (u_old.values[c] < p.delta_cut) ? 1.0 / p.delta_cut : 0.0;
      rhs[ic] -= 0.5 * cfg.volume_cost * sprime * dA;
    }
    for (int i = 0; i < slv.n_u; ++i) trip.emplace_back(i, i, diag[i]);

    Eigen::SparseMatrix<double> A(slv.n_u, slv.n_u);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    if (!slv.analyzed_u) {
      slv.lu_u.analyzePattern(A);
      slv.analyzed_u = true;
    }
    slv.lu_u.factorize(A);
    if (slv.lu_u.info() != Eigen::Success) throw SolverFault("at_minimize: u-step factorization failed");
    Eigen::VectorXd x = slv.lu_u.solve(rhs);

    GridField u_new = u;
    for (size_t c = 0; c < ncells; ++c) {
      const int ic = slv.u_index[c];
      u_new.values[c] = (ic < 0) ? 1.0 : std::clamp(x[ic], 0.0, 1.0);
    }
    return u_new;
  };

  // z-step: exact minimizer of F_eps in z (M-matrix, z in [0,1]).
  auto z_step = [&](double eps) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(faces.size() * 4 + ncells);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(ncells));
    std::vector<double> diag(ncells, 1e-12);
    for (size_t c = 0; c < ncells; ++c) rhs[static_cast<int>(c)] = 1e-12;  // degenerate cells -> z = 1

    for (const Face& f : faces) {
      const double du = (u.values[f.b] - u.values[f.a]) / f.dh;
      const double df = du * du * dA;  // from (z_a^2 + z_b^2)/2 |du|^2
      const double qf = 0.5 * (q_weight(u.values[f.a]) + q_weight(u.values[f.b]));
      const double bf = h * w * eps * qf * dA / (f.dh * f.dh);
      diag[f.a] += df + 2.0 * bf;
      diag[f.b] += df + 2.0 * bf;
      trip.emplace_back(f.a, f.b, -2.0 * bf);
      trip.emplace_back(f.b, f.a, -2.0 * bf);
    }
    for (size_t c = 0; c < ncells; ++c) {
      const double gc = h * w * (q_weight(u.values[c]) + p.reaction_floor) / (2.0 * eps) * dA;
      diag[c] += gc;
      rhs[static_cast<int>(c)] += gc;
    }
    for (size_t c = 0; c < ncells; ++c)
      trip.emplace_back(static_cast<int>(c), static_cast<int>(c), diag[c]);

    Eigen::SparseMatrix<double> A(static_cast<int>(ncells), static_cast<int>(ncells));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    if (!slv.analyzed_z) {
      slv.lu_z.analyzePattern(A);
      slv.analyzed_z = true;
    }
    slv.lu_z.factorize(A);
    if (slv.lu_z.info() != Eigen::Success) throw SolverFault("at_minimize: z-step factorization failed");
    Eigen::VectorXd x = slv.lu_z.solve(rhs);

    GridField z_new = z;
    for (size_t c = 0; c < ncells; ++c) z_new.values[c] = std::clamp(x[static_cast<int>(c)], 0.0, 1.0);
    return z_new;
  };

  for (double mult : p.schedule_or_default()) {
    const double eps = mult * grid.dx;
    StageTrace stage;
    stage.eps = eps;
    double f_cur = f_eps_of(u, z, eps);
    stage.f_eps.push_back(f_cur);

    for (int alt = 0; alt < p.max_alternations; ++alt) {
      ++res.total_alternations;

      // z half-step first: exact minimizer, and it wraps the current (sharp)
      // interface in its ridge before the u-step diffuses it
      z = z_step(eps);
      {
        const double f_after = f_eps_of(u, z, eps);
        if (f_after > f_cur + 1e-10 * std::max(1.0, std::fabs(f_cur)))
          throw SolverFault("at_minimize: z-step increased F_eps");
        f_cur = f_after;
      }

      // u half-step with relaxation fallback on non-monotone F_eps
      GridField u_cand = u_step(eps, u);
      double relax = 1.0;
      GridField u_try = u_cand;
      double f_try = f_eps_of(u_try, z, eps);
      while (f_try > f_cur + 1e-10 * std::max(1.0, std::fabs(f_cur)) && relax > 1.0 / 1024.0) {
        relax *= 0.5;
        u_try = u;
        for (size_t c = 0; c < ncells; ++c)
          u_try.values[c] = u.values[c] + relax * (u_cand.values[c] - u.values[c]);
        f_try = f_eps_of(u_try, z, eps);
      }
      if (f_try > f_cur + 1e-10 * std::max(1.0, std::fabs(f_cur))) {
        // Relaxation exhausted. A tiny residual increase means the clamped
        // direction is no longer a descent direction: the u-step has
        // stalled at its constrained stationary point. Anything larger is a
        // genuine linearization failure.
        if (f_try - f_cur > 1e-6 * std::max(1.0, std::fabs(f_cur)))
          throw SolverFault(
              "at_minimize: persistent non-monotone F_eps in the u-step (stage eps = " +
              std::to_string(eps) + ", alternation " + std::to_string(alt) + ")");
      } else {
        u = u_try;
        f_cur = f_try;
      }

      const double drop = stage.f_eps.back() - f_cur;
      stage.f_eps.push_back(f_cur);
      if (drop <= p.alt_tol * std::max(std::fabs(f_cur), 1e-300) && alt >= 1) break;
    }

    res.u = u;
    res.z = z;
    stage.sharp_extracted = energy_sbv(extracted_field(res, p), cfg, sbv);
    res.stages.push_back(std::move(stage));
  }

  res.u = u;
  res.z = z;
  res.a_mask = grid.make(0.0);
  res.k_mask = grid.make(0.0);
  for (size_t c = 0; c < ncells; ++c) {
    if (u.values[c] > p.delta_cut) res.a_mask.values[c] = 1.0;
    if (z.values[c] < p.z_cut) res.k_mask.values[c] = 1.0;
  }
  return res;
}

GridField extracted_field(const PhaseFieldResult& result, const PFParams& p) {
  GridField out = result.u;
  for (size_t c = 0; c < out.values.size(); ++c)
    if (!(result.u.values[c] > p.delta_cut) || result.z.values[c] < p.z_cut) out.values[c] = 0.0;
  return out;
}

std::vector<std::pair<int, int>> touching_components(const ExtractResult& ex, int max_steps) {
  const GridField& k = ex.k_mask;
  const int nx = k.nx, ny = k.ny;
  const size_t ncells = k.values.size();

  std::vector<int> owner(ncells, -1), dist(ncells, -1);
  std::queue<std::pair<int, int>> q;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const size_t c = static_cast<size_t>(j) * nx + i;
      if (ex.labels_pos[c] >= 0) {
        owner[c] = ex.labels_pos[c];
        dist[c] = 0;
        q.push({i, j});
      }
    }

  std::vector<std::pair<int, int>> pairs;
  auto record = [&pairs](int a, int b) {
    if (a > b) std::swap(a, b);
    for (auto& pr : pairs)
      if (pr.first == a && pr.second == b) return;
    pairs.push_back({a, b});
  };

  while (!q.empty()) {
    auto [ci, cj] = q.front();
    q.pop();
    const size_t c = static_cast<size_t>(cj) * nx + ci;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int ni = ci + di[d], nj = cj + dj[d];
      if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
      const size_t nc = static_cast<size_t>(nj) * nx + ni;
      if (owner[nc] >= 0) {
        if (owner[nc] != owner[c] && dist[c] + dist[nc] + 1 <= max_steps)
          record(owner[c], owner[nc]);
        continue;
      }
      // expansion is allowed only through the jump strip
      if (k.values[nc] < 0.5 || dist[c] + 1 > max_steps) continue;
      owner[nc] = owner[c];
      dist[nc] = dist[c] + 1;
      q.push({ni, nj});
    }
  }
  return pairs;
}

ExtractResult extract_sets(const PhaseFieldResult& result, const PFParams& p) {
  const GridField& u = result.u;
  const GridField& z = result.z;
  const int nx = u.nx, ny = u.ny;
  const size_t ncells = u.values.size();

  ExtractResult ex;
  ex.a_mask = u;
  ex.k_mask = u;
  std::vector<char> in_a(ncells, 0), in_ak(ncells, 0), in_zero(ncells, 0);
  bool any_a = false;
  for (size_t c = 0; c < ncells; ++c) {
    const bool a = u.values[c] > p.delta_cut;
    const bool k = z.values[c] < p.z_cut;
    ex.a_mask.values[c] = a ? 1.0 : 0.0;
    ex.k_mask.values[c] = k ? 1.0 : 0.0;
    in_a[c] = a;
    in_ak[c] = a && !k;
    in_zero[c] = !a;
    any_a |= a;
  }
  if (!any_a) throw SolverFault("extract_sets: extracted A is empty (must contain Omega)");

  ex.n_pos_components = label_components(nx, ny, in_ak, ex.labels_pos);
  ex.n_zero_components = label_components(nx, ny, in_zero, ex.labels_zero);
  return ex;
}

}  // namespace ins
