#ifndef INSULATE_PHASE_FIELD_HPP
#define INSULATE_PHASE_FIELD_HPP

#include <cstdint>

#include "insulate/types.hpp"

namespace ins {

struct GridSpec {
  int nx = 256;
  int ny = 256;
  double x0 = -3.2;
  double y0 = -3.2;
  double dx = 0.025;
  double dy = 0.025;

  GridField make(double fill = 0.0) const { return GridField(nx, ny, x0, y0, dx, dy, fill); }
};

struct StageTrace {
  double eps = 0.0;                 // physical interface width this stage
  std::vector<double> f_eps;        // F_eps after each alternation (monotone)
  EnergyBreakdown sharp_extracted;  // energy_sbv of the extracted configuration
};

struct PhaseFieldResult {
  GridField u;
  GridField z;
  std::vector<StageTrace> stages;
  GridField a_mask;   // A = {u > delta_cut}
  GridField k_mask;   // K = {z < z_cut}
  uint64_t seed = 0;
  int total_alternations = 0;
};

// Alternating minimization of
//   F_eps(u,z) = int (z^2 + k_eps)|grad u|^2
//              + h w int q(u) (eps |grad z|^2 + (1-z)^2 / (4 eps))
//              + C0 int sigma_delta(u),
// with q(u) = 2 u^2, sigma_delta(u) = clamp(u/delta_cut, 0, 1), u = 1 clamped
// on Omega, over a decreasing epsilon schedule. The u-step lags the sigma
// derivative (linearization) and clamps to [0,1]; the z-step is an exact
// quadratic solve. F_eps decreases within each stage, with relaxation
// halving on a linearization failure.
PhaseFieldResult at_minimize(const ProblemConfig& cfg, const GridSpec& grid, const PFParams& p,
                             uint64_t seed);

struct ExtractResult {
  GridField a_mask;         // {u > delta_cut}
  GridField k_mask;         // {z < z_cut}
  std::vector<int> labels_pos;   // component id per cell for A \ K, -1 outside
  std::vector<int> labels_zero;  // component id per cell for {u <= delta_cut}, -1 outside
  int n_pos_components = 0;
  int n_zero_components = 0;
};

ExtractResult extract_sets(const PhaseFieldResult& result, const PFParams& p);

// Pairs of distinct positive components separated only by the jump strip K:
// dilating the components through K cells by at most max_steps makes them
// meet. The discrete reading of "closures intersect" across a diffuse ridge.
std::vector<std::pair<int, int>> touching_components(const ExtractResult& ex, int max_steps);

// The classical-pair field: u on A \ K, zero on K and the zero phase. This is
// the field the quantitative sharp evaluation runs on.
GridField extracted_field(const PhaseFieldResult& result, const PFParams& p);

// Rasterized seeding field: the radial-oracle solution around Omega (exact
// for disk variants; distance-based profile otherwise).
GridField oracle_seed(const ProblemConfig& cfg, const GridSpec& grid);

}  // namespace ins

#endif
