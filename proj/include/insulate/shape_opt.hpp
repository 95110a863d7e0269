#ifndef INSULATE_SHAPE_OPT_HPP
#define INSULATE_SHAPE_OPT_HPP

#include "insulate/robin_solver.hpp"
#include "insulate/types.hpp"

namespace ins {

// Coefficient packing for gradients: [a0, a1..aM, b1..bM].
std::vector<double> pack_coefficients(const StarShape& s);
StarShape unpack_coefficients(const std::vector<double>& x, Point center);

struct OptOptions {
  int n_s = 48;
  int n_theta = 96;
  double grad_tol_rel = 2e-4;  // tolerance on |precond. gradient| * rho0 / F
  int max_iter = 300;
  double gap_min = -1.0;       // <0: kGapMinRel * min rho_Omega
  double fd_step = -1.0;       // <0: choose by curvature probe
  double armijo_c1 = 1e-4;
  int max_backtrack = 40;
};

struct TraceRow {
  int iter = 0;
  EnergyBreakdown energy;
  double grad_norm = 0.0;
};

struct OptResult {
  StarShape shape;               // best attached iterate
  std::vector<TraceRow> trace;   // per-iteration energies (monotone)
  bool converged = false;
  double stationarity_residual = 0.0;  // sup_theta |g| at the final shape
  bool detached = false;               // detached competitor A = Omega wins
  bool tie = false;                    // |attached - detached| <= 1e-9
  double attached_energy = 0.0;
  double detached_energy = 0.0;
  EnergyBreakdown final_energy;        // of the reported configuration

  // Boundary radius of the reported configuration (rho_Omega if detached).
  double reported_radius(double theta, const OmegaSpec& omega) const {
    return detached ? omega.boundary_radius(theta) : shape.radius(theta);
  }
};

// Total energy of a shape: state solve + sharp quadrature.
double shape_energy(const StarShape& shape, const ProblemConfig& cfg, int n_s, int n_theta);

// Central-difference gradient in coefficient space; the ground-truth oracle
// for the analytic first variation. The state is re-solved per probe
// (envelope theorem), unless resolve_state is false, in which case the base
// state's nodal values are transported onto the perturbed mesh.
std::vector<double> shape_gradient_fd(const StarShape& shape, const ProblemConfig& cfg, int n_s,
                                      int n_theta, double fd_step = -1.0,
                                      bool resolve_state = true);

// Pointwise first-variation density along dA (Hadamard calculus with the
// Robin substitution u_nu = -h u):
//   g = |grad_tau u|^2 - h^2 u^2 + h H u^2 + C0,
// where H is the curvature of dA. dF[V] = \oint g V dH^1.
std::vector<double> stationarity_density(const StateSolution& state, const StarShape& shape,
                                         const ProblemConfig& cfg);

// dF[V] for a normal velocity V sampled at the state's theta nodes.
double first_variation(const StateSolution& state, const StarShape& shape,
                       const ProblemConfig& cfg, const std::vector<double>& v_normal);

// Analytic coefficient gradient: dF/da_k = \int g r cos(k theta) dtheta, etc.
std::vector<double> shape_gradient_analytic(const StateSolution& state, const StarShape& shape,
                                            const ProblemConfig& cfg);

// Projected, preconditioned gradient descent with Armijo backtracking.
// Always also evaluates the detached competitor A = Omega (energy h |dOmega|)
// and reports whichever configuration is lower.
OptResult optimize_shape(const ProblemConfig& cfg, const StarShape& init, const OptOptions& opts);

}  // namespace ins

#endif
