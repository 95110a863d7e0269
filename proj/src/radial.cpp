#include "insulate/radial.hpp"

#include <algorithm>

namespace ins {

namespace {

void check_inputs(int n, double h, double rho0, double R) {
  if (n != 2 && n != 3) throw PreconditionError("radial: dimension must be 2 or 3");
  if (!(rho0 > 0.0)) throw PreconditionError("radial: rho0 must be positive");
  if (h < 0.0) throw PreconditionError("radial: h must be non-negative");
  if (R < rho0) throw PreconditionError("radial: R must satisfy R >= rho0");
}

RadialSolution profile_only(int n, double h, double rho0, double R) {
  RadialSolution s;
  s.n = n;
  s.rho0 = rho0;
  s.R = R;
  s.h = h;
  if (R == rho0 || h == 0.0) {
    s.c = 0.0;
    s.u_outer = 1.0;
  } else if (n == 2) {
    s.c = -h / (1.0 / R + h * std::log(R / rho0));
    s.u_outer = 1.0 + s.c * std::log(R / rho0);
  } else {
    // -b/R^2 + h (a + b/R) = 0 with a = 1 - b/rho0.
    s.c = h / (1.0 / (R * R) + h * (1.0 / rho0 - 1.0 / R));
    s.u_outer = 1.0 - s.c * (1.0 / rho0 - 1.0 / R);
  }
  return s;
}

}  // namespace

double RadialSolution::u(double r) const {
  if (R == rho0) return 1.0;
  if (n == 2) return 1.0 + c * std::log(r / rho0);
  const double a = 1.0 - c / rho0;
  return a + c / r;
}

double RadialSolution::du(double r) const {
  if (R == rho0) return 0.0;
  if (n == 2) return c / r;
  return -c / (r * r);
}

double RadialSolution::flux() const {
  if (n == 2) return kTwoPi * std::fabs(c);
  return 4.0 * kPi * std::fabs(c);
}

double RadialSolution::robin_residual() const {
  if (R == rho0) return 0.0;  // degenerate zero-thickness shell
  return std::fabs(du(R) + h * u(R));
}

RadialSolution radial_profile(int n, double h, double rho0, double R) {
  check_inputs(n, h, rho0, R);
  RadialSolution s = profile_only(n, h, rho0, R);
  s.energy = radial_energy(n, h, 0.0, rho0, R);
  return s;
}

EnergyBreakdown radial_energy(int n, double h, double c0, double rho0, double R) {
  check_inputs(n, h, rho0, R);
  if (c0 < 0.0) throw PreconditionError("radial: C0 must be non-negative");

  double dirichlet = 0.0, surface = 0.0, volume = 0.0;
  if (n == 2) {
    volume = c0 * kPi * (R * R - rho0 * rho0);
    if (R == rho0) {
      surface = h * kTwoPi * rho0;  // u == 1 on the bare boundary
    } else {
      RadialSolution s = profile_only(n, h, rho0, R);
      dirichlet = kTwoPi * s.c * s.c * std::log(R / rho0);
      surface = h * kTwoPi * R * s.u_outer * s.u_outer;
    }
  } else {
    volume = c0 * (4.0 / 3.0) * kPi * (R * R * R - rho0 * rho0 * rho0);
    if (R == rho0) {
      surface = h * 4.0 * kPi * rho0 * rho0;
    } else {
      RadialSolution s = profile_only(n, h, rho0, R);
      dirichlet = 4.0 * kPi * s.c * s.c * (1.0 / rho0 - 1.0 / R);
      surface = h * 4.0 * kPi * R * R * s.u_outer * s.u_outer;
    }
  }
  return EnergyBreakdown::make(dirichlet, surface, volume);
}

RadialOptimum optimize_radius(int n, double h, double c0, double rho0) {
  check_inputs(n, h, rho0, rho0);
  RadialOptimum opt;

  const double f_detached = radial_energy(n, h, c0, rho0, rho0).total;

  if (c0 == 0.0) {
    // In n = 2 the energy decreases toward 0 as R -> infinity; the infimum is
    // not attained. Report a capped R with a warning.
    opt.r_max = 1000.0 * rho0;
    opt.attained = false;
    opt.warning = "C0 = 0: infimum may be non-attained; returning R_max";
    const double f_far = radial_energy(n, h, c0, rho0, opt.r_max).total;
    if (f_far < f_detached) {
      opt.r_star = opt.r_max;
      opt.energy = radial_energy(n, h, c0, rho0, opt.r_max);
      opt.interior = true;
    } else {
      opt.r_star = rho0;
      opt.energy = radial_energy(n, h, c0, rho0, rho0);
    }
    opt.f_star = opt.energy.total;
    opt.delta_radial = radial_profile(n, h, rho0, opt.r_star).u_outer;
    return opt;
  }

  opt.r_max = rho0 + 2.0 * std::pow(f_detached / c0, 1.0 / n);

  auto f = [&](double R) { return radial_energy(n, h, c0, rho0, R).total; };

  // Golden-section search; robust when the minimum sits at R = rho0.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = rho0, b = opt.r_max;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double tol = 1e-10 * rho0;
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  // Near the optimum the energy is roundoff-flat over ~1e-7 rho0, which
  // caps golden-section placement accuracy. Polish interior candidates by
  // bisecting the central-difference derivative.
  double r_int = 0.5 * (a + b);
  if (r_int > rho0 + tol && r_int < opt.r_max - tol) {
    const double dstep = 1e-6 * rho0;
    auto df = [&](double R) { return (f(R + dstep) - f(R - dstep)) / (2.0 * dstep); };
    double lo = r_int - dstep, hi = r_int + dstep;
    for (int widen = 0; widen < 8 && (df(lo) > 0.0 || df(hi) < 0.0); ++widen) {
      const double w = hi - lo;
      lo = std::max(rho0, lo - w);
      hi = std::min(opt.r_max, hi + w);
    }
    if (df(lo) <= 0.0 && df(hi) >= 0.0) {
      for (int it = 0; it < 100 && hi - lo > 1e-12 * rho0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (df(mid) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      r_int = 0.5 * (lo + hi);
    }
  }
  const double f_int = f(r_int);

  if (f_int < f_detached) {
    opt.r_star = r_int;
    opt.f_star = f_int;
    opt.interior = r_int > rho0 + tol;
  } else {
    opt.r_star = rho0;
    opt.f_star = f_detached;
    opt.interior = false;
  }
  opt.energy = radial_energy(n, h, c0, rho0, opt.r_star);
  opt.f_star = opt.energy.total;
  opt.delta_radial = radial_profile(n, h, rho0, opt.r_star).u_outer;
  return opt;
}

}  // namespace ins
