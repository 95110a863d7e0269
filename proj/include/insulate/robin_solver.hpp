#ifndef INSULATE_ROBIN_SOLVER_HPP
#define INSULATE_ROBIN_SOLVER_HPP

#include <optional>

#include "insulate/types.hpp"

namespace ins {

// Discrete temperature field on the boundary-fitted mesh
//   r(s,theta) = rho_Omega(theta) + s (r_A(theta) - rho_Omega(theta)),
// s in [0,1] (N_s layers), theta periodic (N_theta nodes).
// u is stored row-major, u[i*N_theta + j] with i the radial index.
struct StateSolution {
  int n_s = 0;
  int n_theta = 0;
  Point center;
  double h = 0.0;
  std::vector<double> rho;    // rho_Omega(theta_j)
  std::vector<double> rho1;   // d rho / d theta
  std::vector<double> ra;     // r_A(theta_j)
  std::vector<double> ra1;    // d r_A / d theta
  std::vector<double> u;      // nodal values in [0,1]
  std::vector<double> trace_outer;  // u(1, theta_j)
  std::vector<double> flux_inner;   // -du/dnu on dOmega per node
  double robin_residual_sup = 0.0;
  double linear_residual = 0.0;  // relative residual of the linear solve

  double at(int i, int j) const { return u[static_cast<size_t>(i) * n_theta + j]; }
  double ds() const { return 1.0 / (n_s - 1); }
  double dtheta() const { return kTwoPi / n_theta; }
  // Total heat flux through dOmega, \int_{dOmega} -u_nu dH^{n-1}.
  double total_flux() const;
};

// Admissibility of a star shape around Omega: r(theta) >= rho_Omega + gap at
// every sampled angle. gap_min defaults to 0.02 * min rho_Omega.
constexpr double kGapMinRel = 0.02;
bool shape_admissible(const StarShape& shape, const OmegaSpec& omega, double gap_min,
                      double* worst_margin = nullptr);
void require_admissible(const StarShape& shape, const OmegaSpec& omega, double gap_min);

struct SolveOptions {
  // Test hook: manufactured Dirichlet data on dOmega and Robin right-hand side
  // g with u_nu + h u = g on dA (both sampled at theta_j). Production solves
  // leave these empty (u = 1, g = 0).
  std::optional<std::vector<double>> dirichlet_data;
  std::optional<std::vector<double>> robin_rhs;
  double gap_min = -1.0;  // <0: use kGapMinRel * min rho_Omega
};

// Solve Delta u = 0 in A \ Omega, u = 1 on dOmega, u_nu + h u = 0 on dA, with
// a second-order finite-difference discretization in mapped coordinates.
StateSolution solve_state(const StarShape& shape, const ProblemConfig& cfg, int n_s, int n_theta,
                          const SolveOptions& opts = {});

// Energy via the flux identity: dirichlet + surface = \int_{dOmega} -u_nu.
// The breakdown reports surface from the outer-trace quadrature and
// dirichlet = flux - surface; total = flux + C0 |A \ Omega|.
// Cross-checks against the quadrature route (energy_sharp) and throws
// SolverFault if they disagree far beyond the expected mesh-order bound.
EnergyBreakdown energy_from_flux(const StateSolution& state, const StarShape& shape,
                                 const ProblemConfig& cfg);

}  // namespace ins

#endif
