#ifndef INSULATE_RADIAL_HPP
#define INSULATE_RADIAL_HPP

#include "insulate/types.hpp"

namespace ins {

// Closed-form solution for Omega = ball of radius rho0 and A = concentric
// ball of radius R: u harmonic in the shell, u = 1 on the inner sphere and
// u' + h u = 0 on the outer one.
//
//   n = 2:  u(r) = 1 + c ln(r/rho0),  c = -h / (1/R + h ln(R/rho0))
//   n = 3:  u(r) = a + b/r            (b = coefficient stored in `c`)
struct RadialSolution {
  int n = 2;
  double rho0 = 1.0;
  double R = 1.0;
  double h = 1.0;
  double c = 0.0;        // profile coefficient (c for n=2, b for n=3)
  double u_outer = 1.0;  // u(R)
  EnergyBreakdown energy;

  double u(double r) const;       // profile value, r in [rho0, R]
  double du(double r) const;      // radial derivative
  double flux() const;            // \int_{dOmega} -du/dr = 2*pi*|c| (n=2), 4*pi*b (n=3)
  double robin_residual() const;  // |u'(R) + h u(R)|
};

RadialSolution radial_profile(int n, double h, double rho0, double R);

EnergyBreakdown radial_energy(int n, double h, double c0, double rho0, double R);

struct RadialOptimum {
  double r_star = 0.0;
  double f_star = 0.0;
  EnergyBreakdown energy;
  bool interior = false;   // true if r_star > rho0 (strictly)
  bool attained = true;    // false for the C0 = 0 non-attainment case
  double r_max = 0.0;      // search upper bound used
  double delta_radial = 1.0;  // u(R*): the radial analogue of the paper's lower bound
  std::string warning;
};

// Golden-section minimization of radial_energy over R in [rho0, r_max], with
// r_max = rho0 + 2 (F(rho0)/C0)^{1/n} by default (volume cost exceeds the
// no-insulation energy beyond it). Returns the better of the interior optimum
// and the detached endpoint R = rho0.
RadialOptimum optimize_radius(int n, double h, double c0, double rho0);

}  // namespace ins

#endif
