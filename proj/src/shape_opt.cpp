#include "insulate/shape_opt.hpp"

#include <algorithm>

#include "insulate/model.hpp"

namespace ins {

namespace {

double effective_gap(const OptOptions& opts, const OmegaSpec& omega) {
  return opts.gap_min >= 0.0 ? opts.gap_min : kGapMinRel * omega.min_radius();
}

// Transported-state energy: keep the base nodal values, move the mesh to the
// perturbed shape. Used for the frozen-u envelope check.
double transported_energy(const StateSolution& base, const StarShape& shape,
                          const ProblemConfig& cfg) {
  StateSolution st = base;
  for (int j = 0; j < st.n_theta; ++j) {
    const double th = kTwoPi * j / st.n_theta;
    st.ra[j] = shape.radius(th);
    st.ra1[j] = shape.radius_d1(th);
  }
  return energy_sharp(st, shape, cfg).total;
}

}  // namespace

std::vector<double> pack_coefficients(const StarShape& s) {
  const int m = s.modes();
  std::vector<double> x;
  x.reserve(2 * m + 1);
  for (int k = 0; k <= m; ++k) x.push_back(s.cos_coef[k]);
  for (int k = 1; k <= m; ++k) x.push_back(s.sin_coef[k]);
  return x;
}

StarShape unpack_coefficients(const std::vector<double>& x, Point center) {
  const int m = (static_cast<int>(x.size()) - 1) / 2;
  StarShape s(center, m, x[0]);
  for (int k = 1; k <= m; ++k) {
    s.cos_coef[k] = x[k];
    s.sin_coef[k] = x[m + k];
  }
  return s;
}

double shape_energy(const StarShape& shape, const ProblemConfig& cfg, int n_s, int n_theta) {
  StateSolution st = solve_state(shape, cfg, n_s, n_theta);
  return energy_sharp(st, shape, cfg).total;
}

std::vector<double> shape_gradient_fd(const StarShape& shape, const ProblemConfig& cfg, int n_s,
                                      int n_theta, double fd_step, bool resolve_state) {
  const double gap = kGapMinRel * cfg.omega.min_radius();
  double margin = 0.0;
  if (!shape_admissible(shape, cfg.omega, gap, &margin))
    throw PreconditionError("shape_gradient_fd: shape not admissible");

  const double rho0 = cfg.omega.min_radius();
  double step = fd_step;
  if (step <= 0.0) {
    // One-time curvature probe in a0 to balance roundoff against truncation.
    const double probe = 1e-2 * rho0;
    StarShape sp = shape, sm = shape;
    sp.cos_coef[0] += probe;
    sm.cos_coef[0] -= probe;
    const double f0 = shape_energy(shape, cfg, n_s, n_theta);
    const double fpp = shape_energy(sp, cfg, n_s, n_theta);
    const double fmm = shape_energy(sm, cfg, n_s, n_theta);
    const double curv = std::fabs(fpp - 2.0 * f0 + fmm) / (probe * probe);
    step = std::cbrt(1e-13 * std::max(std::fabs(f0), 1.0) / std::max(curv, 1e-8));
    step = std::clamp(step, 1e-6 * rho0, 1e-3 * rho0);
  }

  // A coefficient perturbation of size `step` moves r(theta) by at most
  // `step`; probes need twice that much margin. Shrink on violation.
  int shrink = 0;
  while (margin < 2.0 * step && shrink < 8) {
    step *= 0.5;
    ++shrink;
  }
  if (margin < 2.0 * step)
    throw PreconditionError("shape_gradient_fd: no admissible probing step within the gap margin");

  StateSolution base;
  if (!resolve_state) base = solve_state(shape, cfg, n_s, n_theta);

  auto energy_of = [&](const StarShape& s) {
    return resolve_state ? shape_energy(s, cfg, n_s, n_theta) : transported_energy(base, s, cfg);
  };

  const std::vector<double> x0 = pack_coefficients(shape);
  std::vector<double> grad(x0.size(), 0.0);
  for (size_t c = 0; c < x0.size(); ++c) {
    std::vector<double> xp = x0, xm = x0;
    xp[c] += step;
    xm[c] -= step;
    const double fp = energy_of(unpack_coefficients(xp, shape.center));
    const double fm = energy_of(unpack_coefficients(xm, shape.center));
    grad[c] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

std::vector<double> stationarity_density(const StateSolution& state, const StarShape& shape,
                                         const ProblemConfig& cfg) {
  const int nt = state.n_theta;
  const double dth = state.dtheta();
  const double h = cfg.robin_h;

  std::vector<double> g(nt);
  auto trace = [&](int j) { return state.trace_outer[((j % nt) + nt) % nt]; };
  for (int j = 0; j < nt; ++j) {
    const double th = kTwoPi * j / nt;
    // fourth-order central derivative of the periodic trace
    const double ud = (-trace(j + 2) + 8.0 * trace(j + 1) - 8.0 * trace(j - 1) + trace(j - 2)) /
                      (12.0 * dth);
    const double arc = std::sqrt(state.ra[j] * state.ra[j] + state.ra1[j] * state.ra1[j]);
    const double grad_tau = ud / arc;
    const double u = trace(j);
    const double curv = shape.curvature(th);
    g[j] = grad_tau * grad_tau - h * h * u * u + h * curv * u * u + cfg.volume_cost;
  }
  return g;
}

double first_variation(const StateSolution& state, const StarShape& shape,
                       const ProblemConfig& cfg, const std::vector<double>& v_normal) {
  if (static_cast<int>(v_normal.size()) != state.n_theta)
    throw PreconditionError("first_variation: V must be sampled at the state's theta nodes");
  const std::vector<double> g = stationarity_density(state, shape, cfg);
  const double dth = state.dtheta();
  double df = 0.0;
  for (int j = 0; j < state.n_theta; ++j) {
    const double arc = std::sqrt(state.ra[j] * state.ra[j] + state.ra1[j] * state.ra1[j]);
    df += g[j] * v_normal[j] * arc * dth;
  }
  return df;
}

std::vector<double> shape_gradient_analytic(const StateSolution& state, const StarShape& shape,
                                            const ProblemConfig& cfg) {
  // A coefficient perturbation delta r(theta) produces the normal velocity
  // V = delta_r * r / sqrt(r^2 + r_theta^2), so dF/dc = \int g r delta_r dtheta.
  const std::vector<double> g = stationarity_density(state, shape, cfg);
  const int nt = state.n_theta;
  const double dth = state.dtheta();
  const int m = shape.modes();

  std::vector<double> grad(2 * m + 1, 0.0);
  for (int j = 0; j < nt; ++j) {
    const double th = kTwoPi * j / nt;
    const double w = g[j] * state.ra[j] * dth;
    grad[0] += w;
    for (int k = 1; k <= m; ++k) {
      grad[k] += w * std::cos(k * th);
      grad[m + k] += w * std::sin(k * th);
    }
  }
  return grad;
}

OptResult optimize_shape(const ProblemConfig& cfg, const StarShape& init, const OptOptions& opts) {
  cfg.validate();
  const double gap = effective_gap(opts, cfg.omega);
  require_admissible(init, cfg.omega, gap);

  const double rho0 = cfg.omega.min_radius();
  const int m = init.modes();

  auto precondition = [m](const std::vector<double>& g) {
    std::vector<double> p(g.size());
    p[0] = g[0];
    for (int k = 1; k <= m; ++k) {
      p[k] = g[k] / (1.0 + k * k);
      p[m + k] = g[m + k] / (1.0 + k * k);
    }
    return p;
  };
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  auto repair = [&](StarShape s) {
    // Projection surrogate: inflate a0 until the gap constraint holds.
    double margin = 0.0;
    if (!shape_admissible(s, cfg.omega, gap, &margin))
      s.cos_coef[0] += -margin + 1e-3 * gap;
    return s;
  };

  OptResult res;
  StarShape cur = init;
  StateSolution st = solve_state(cur, cfg, opts.n_s, opts.n_theta);
  double f_cur = energy_sharp(st, cur, cfg).total;
  const double f_init = f_cur;

  double alpha = 0.05 * rho0;  // step carried across iterations
  bool line_search_failed = false;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const std::vector<double> grad = shape_gradient_analytic(st, cur, cfg);
    const std::vector<double> pgrad = precondition(grad);
    const double gnorm = norm2(pgrad);
    res.trace.push_back({iter, energy_sharp(st, cur, cfg), gnorm});

    if (gnorm * rho0 <= opts.grad_tol_rel * std::max(f_init, 1e-300)) {
      res.converged = true;
      break;
    }

    double dir_deriv = 0.0;  // <g, pgrad>
    for (size_t c = 0; c < grad.size(); ++c) dir_deriv += grad[c] * pgrad[c];

    bool accepted = false;
    double a = std::min(alpha, 0.2 * rho0 / std::max(gnorm, 1e-300));
    for (int bt = 0; bt < opts.max_backtrack; ++bt) {
      std::vector<double> x = pack_coefficients(cur);
      for (size_t c = 0; c < x.size(); ++c) x[c] -= a * pgrad[c];
      StarShape cand = repair(unpack_coefficients(x, cur.center));
      if (!shape_admissible(cand, cfg.omega, gap, nullptr)) {
        a *= 0.5;
        continue;
      }
      StateSolution st_cand;
      double f_cand;
      try {
        st_cand = solve_state(cand, cfg, opts.n_s, opts.n_theta);
        f_cand = energy_sharp(st_cand, cand, cfg).total;
      } catch (const std::exception&) {
        a *= 0.5;
        continue;
      }
      if (f_cand <= f_cur - opts.armijo_c1 * a * dir_deriv) {
        cur = cand;
        st = std::move(st_cand);
        f_cur = f_cand;
        alpha = (bt == 0) ? a * 1.5 : a;
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      line_search_failed = true;
      break;
    }
  }
  if (iter == opts.max_iter || line_search_failed) res.converged = false;

  res.shape = cur;
  res.attached_energy = f_cur;
  {
    const std::vector<double> g = stationarity_density(st, cur, cfg);
    double s = 0.0;
    for (double v : g) s = std::max(s, std::fabs(v));
    res.stationarity_residual = s;
  }

  // The detached competitor A = Omega is always admissible and its energy is
  // exactly h |dOmega|.
  res.detached_energy = cfg.robin_h * cfg.omega.boundary_length();
  res.tie = std::fabs(res.detached_energy - res.attached_energy) <= 1e-9;
  if (res.detached_energy < res.attached_energy && !res.tie) {
    res.detached = true;
    res.final_energy = EnergyBreakdown::make(0.0, res.detached_energy, 0.0);
  } else {
    res.detached = false;
    res.final_energy = energy_sharp(st, cur, cfg);
  }
  return res;
}

}  // namespace ins
