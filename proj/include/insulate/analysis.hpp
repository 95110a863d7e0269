#ifndef INSULATE_ANALYSIS_HPP
#define INSULATE_ANALYSIS_HPP

#include "insulate/model.hpp"
#include "insulate/robin_solver.hpp"
#include "insulate/shape_opt.hpp"
#include "insulate/types.hpp"

namespace ins {

struct LowerBoundReport {
  double delta_obs = 0.0;  // min of u over {u > delta_cut}; NaN if that set is empty
  double gap_mass = 0.0;   // area fraction with u in (delta_cut, 0.9 delta_obs)
  double halo_budget = 0.0;  // perimeter({u > delta_cut}) * dx / domain area
  bool violation = false;    // gap_mass exceeds the halo budget
  bool empty = false;
};

LowerBoundReport check_lower_bound(const GridField& u, double delta_cut);

struct DensityEntry {
  Point point;
  double r = 0.0;
  double ratio = 0.0;  // face-counted length of K in B_r divided by r^{n-1}
  bool skipped = false;  // ball exits the grid
};

struct DensityReport {
  std::vector<DensityEntry> entries;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  int n_skipped = 0;
};

// K is carried as its detected jump faces; H^{n-1} is the total length of
// faces whose midpoints fall in the ball.
DensityReport density_profile(const std::vector<JumpFace>& k_faces, const GridField& grid,
                              const std::vector<Point>& points, const std::vector<double>& radii);

struct BlowupReport {
  Point point;
  std::vector<double> radii;     // decreasing
  std::vector<double> e_r;       // r^{1-n} \int_{B_r} |grad u|^2 (jump faces excluded)
  std::vector<double> flatness;  // per radius: min over directions of slab half-width / r
  enum class Class { FlatCandidate, SingularCandidate, Unresolved } classification =
      Class::Unresolved;
  double zeta_obs = 0.0;  // observed floor of e_r (meaningful for singular candidates)
};

// eps_flat: flatness threshold for the flat-candidate classification. The
// energy-gap constant of the classification is not explicit in theory, so
// only the observed floor zeta_obs is reported for singular candidates.
BlowupReport blowup_scan(const GridField& u, const std::vector<JumpFace>& k_faces, Point point,
                         std::vector<double> radii, double tau, double eps_flat = 0.1);

// sup-norm of the first-variation density g along dA; refuses non-converged
// optimizer output.
double el_residual(const StateSolution& state, const StarShape& shape, const ProblemConfig& cfg,
                   bool converged);

struct HoleReport {
  int component = -1;
  double area = 0.0;
  double perimeter = 0.0;          // l1 face-counted boundary length
  double convexity_defect = 0.0;   // area(pixel hull)/area - 1 (exact on pixels)
  double roundness = 0.0;          // min direction projection width / perimeter
  double separation_ratio = 0.0;   // dist(hole, K minus its own boundary) / perimeter; NaN if no other K
  bool skipped = false;            // touches the grid boundary
};

// labels: component id per cell (-1 outside), as produced by extract_sets'
// zero-phase labeling. k_mask may be empty when no separation is wanted.
std::vector<HoleReport> hole_geometry(const std::vector<int>& labels, int n_components,
                                      const GridField& grid, const GridField* k_mask = nullptr);

// Pixel convexity: the component equals the set of cells whose centers lie
// in the convex hull of its cell centers (exact integer test).
bool pixel_convex(const std::vector<std::pair<int, int>>& cells);

}  // namespace ins

#endif
