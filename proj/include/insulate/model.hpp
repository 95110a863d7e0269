#ifndef INSULATE_MODEL_HPP
#define INSULATE_MODEL_HPP

#include "insulate/robin_solver.hpp"
#include "insulate/types.hpp"

namespace ins {

// A detected jump face between two 4-neighbor cells.
struct JumpFace {
  int i1, j1, i2, j2;  // the two cells (i2,j2 is the +x or +y neighbor)
  double mid_x, mid_y; // face midpoint
  double length;       // dy for x-faces, dx for y-faces
  double u1, u2;       // adjacent cell values
};

// Faces with |u_i - u_j| > tau, the discrete stand-in for the jump set S_u.
std::vector<JumpFace> detect_jump_faces(const GridField& u, double tau);

// Discrete SBV energy: jump faces contribute h (u_i^2 + u_j^2) * face length
// (both traces squared, multiplicity 2 when both sides are positive); all
// other faces contribute the squared central difference to the Dirichlet
// term; cells outside Omega with u > pi0 contribute C0 * cell area.
EnergyBreakdown energy_sbv(const GridField& u, const ProblemConfig& cfg, const SBVParams& p);

// Sharp-interface energy on the boundary-fitted mesh by trapezoidal
// quadrature; order >= 2 in the mesh widths.
EnergyBreakdown energy_sharp(const StateSolution& state, const StarShape& shape,
                             const ProblemConfig& cfg);

// Elliptic relaxation energy F_eps(u,z); evaluated with exactly the stencils
// the phase_field module minimizes (face-averaged z^2 + k_eps on u-gradients,
// face-averaged q on z-gradients, cellwise reaction and volume terms).
// eps is a physical length.
EnergyBreakdown energy_phase_field(const GridField& u, const GridField& z, double eps,
                                   const ProblemConfig& cfg, const PFParams& p);

// 0/1 indicator of Omega sampled at cell centers.
GridField omega_mask(int nx, int ny, double x0, double y0, double dx, double dy,
                     const OmegaSpec& omega);

// Checks that the grid covers Omega's bounding box; throws otherwise.
void require_grid_covers_omega(const GridField& u, const OmegaSpec& omega);

}  // namespace ins

#endif
