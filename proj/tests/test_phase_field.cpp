#include <doctest.h>

#include <cmath>

#include "insulate/model.hpp"
#include "insulate/phase_field.hpp"
#include "insulate/radial.hpp"

using namespace ins;

namespace {

ProblemConfig disk_problem(double h, double c0, double rho0) {
  ProblemConfig cfg;
  cfg.robin_h = h;
  cfg.volume_cost = c0;
  cfg.allow_degenerate = true;
  cfg.omega = OmegaSpec::disk({0.0, 0.0}, rho0);
  return cfg;
}

GridSpec spec(int n, double half) {
  GridSpec g;
  g.nx = g.ny = n;
  g.x0 = g.y0 = -half;
  g.dx = g.dy = 2.0 * half / n;
  return g;
}

}  // namespace

TEST_CASE("radial benchmark: annulus survives and the sharp energy brackets the oracle") {
  ProblemConfig cfg = disk_problem(1.0, 0.05, 1.0);
  RadialOptimum opt = optimize_radius(2, 1.0, 0.05, 1.0);
  REQUIRE(opt.interior);

  PFParams p;
  p.sbv_tau = 0.15;
  PhaseFieldResult r = at_minimize(cfg, spec(128, 3.2), p, 1234);

  // maximum principle on both fields
  for (double v : r.u.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (double v : r.z.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // F_eps decreases within every stage
  for (const auto& st : r.stages)
    for (size_t k = 1; k < st.f_eps.size(); ++k)
      CHECK(st.f_eps[k] <= st.f_eps[k - 1] + 1e-9 * std::max(1.0, st.f_eps[k - 1]));

  SBVParams sp;
  sp.jump_threshold = p.sbv_tau;
  sp.positivity_cut = p.delta_cut;
  EnergyBreakdown sharp = energy_sbv(extracted_field(r, p), cfg, sp);
  CHECK(sharp.total / opt.f_star >= 0.95);
  CHECK(sharp.total / opt.f_star <= 1.15);

  // extracted boundary sits near the oracle radius
  auto faces = detect_jump_faces(extracted_field(r, p), p.sbv_tau);
  REQUIRE(!faces.empty());
  double rsum = 0.0;
  for (const auto& f : faces) rsum += std::sqrt(f.mid_x * f.mid_x + f.mid_y * f.mid_y);
  CHECK(rsum / faces.size() == doctest::Approx(opt.r_star).epsilon(0.12));

  // single positive component, K collapses onto the outer circle
  ExtractResult ex = extract_sets(r, p);
  CHECK(ex.n_pos_components == 1);

  // energy ladder: the extracted sharp energy sits above F_eps (minus a small
  // slack) at every stage of the continuation
  for (const auto& st : r.stages)
    CHECK(st.sharp_extracted.total >= st.f_eps.back() - 0.02 * st.f_eps.back());

  // the minimum extracted positive value tracks the oracle trace u(R*)
  double dmin = 2.0;
  for (double v : extracted_field(r, p).values)
    if (v > p.delta_cut) dmin = std::min(dmin, v);
  RadialSolution prof = radial_profile(2, 1.0, 1.0, opt.r_star);
  CHECK(std::fabs(dmin - prof.u_outer) / prof.u_outer <= 0.20);
}

TEST_CASE("h = 0 drives the configuration to Omega only") {
  ProblemConfig cfg = disk_problem(0.0, 1.0, 1.0);
  PFParams p;
  PhaseFieldResult r = at_minimize(cfg, spec(64, 2.0), p, 7);
  SBVParams sp;
  sp.jump_threshold = p.sbv_tau;
  sp.positivity_cut = p.delta_cut;
  EnergyBreakdown e = energy_sbv(extracted_field(r, p), cfg, sp);
  // no surface cost, so the volume term drives A down to Omega
  CHECK(e.volume <= 0.1);
  CHECK(e.total == e.dirichlet + e.surface + e.volume);
  double pos_area = 0.0;
  for (double v : r.u.values)
    if (v > p.delta_cut) pos_area += r.u.cell_area();
  CHECK(pos_area == doctest::Approx(kPi).epsilon(0.1));  // |Omega| = pi
}

TEST_CASE("determinism: identical config and seed reproduce bit-for-bit") {
  ProblemConfig cfg = disk_problem(1.0, 0.05, 1.0);
  PFParams p;
  p.noise_amp = 0.02;
  p.max_alternations = 6;
  PhaseFieldResult a = at_minimize(cfg, spec(48, 3.2), p, 42);
  PhaseFieldResult b = at_minimize(cfg, spec(48, 3.2), p, 42);
  REQUIRE(a.u.values.size() == b.u.values.size());
  for (size_t c = 0; c < a.u.values.size(); ++c) {
    CHECK(a.u.values[c] == b.u.values[c]);
    CHECK(a.z.values[c] == b.z.values[c]);
  }
  PhaseFieldResult d = at_minimize(cfg, spec(48, 3.2), p, 43);
  bool differs = false;
  for (size_t c = 0; c < a.u.values.size(); ++c) differs |= a.u.values[c] != d.u.values[c];
  CHECK(differs);  // the seed is live
}

TEST_CASE("F_eps trace values agree with the standalone evaluator") {
  ProblemConfig cfg = disk_problem(1.0, 0.05, 1.0);
  PFParams p;
  p.max_alternations = 4;
  PhaseFieldResult r = at_minimize(cfg, spec(48, 3.2), p, 1);
  const StageTrace& last = r.stages.back();
  const double f = energy_phase_field(r.u, r.z, last.eps, cfg, p).total;
  CHECK(f == doctest::Approx(last.f_eps.back()).epsilon(1e-12));
}

TEST_CASE("extract_sets on trivial fields") {
  ProblemConfig cfg = disk_problem(1.0, 1.0, 0.5);
  PFParams p;
  PhaseFieldResult r;
  r.u = GridField(16, 16, -1.0, -1.0, 0.125, 0.125, 1.0);
  r.z = GridField(16, 16, -1.0, -1.0, 0.125, 0.125, 1.0);
  ExtractResult ex = extract_sets(r, p);
  CHECK(ex.n_pos_components == 1);
  CHECK(ex.n_zero_components == 0);
  for (double v : ex.k_mask.values) CHECK(v == 0.0);

  for (double& v : r.u.values) v = 0.0;
  CHECK_THROWS_AS(extract_sets(r, p), SolverFault);
}

TEST_CASE("touching_components detects separation only through K") {
  PFParams p;
  PhaseFieldResult r;
  r.u = GridField(9, 3, 0.0, 0.0, 1.0, 1.0, 0.0);
  r.z = GridField(9, 3, 0.0, 0.0, 1.0, 1.0, 1.0);
  // [positive][K strip][positive] ... [positive far away]
  for (int j = 0; j < 3; ++j) {
    r.u.at(0, j) = 1.0;
    r.u.at(1, j) = 1.0;
    r.u.at(2, j) = 0.8;  // K cell, still positive
    r.z.at(2, j) = 0.1;
    r.u.at(3, j) = 0.6;
    r.u.at(4, j) = 0.6;
    // cells 5,6 are zero phase
    r.u.at(7, j) = 0.9;
    r.u.at(8, j) = 0.9;
  }
  ExtractResult ex = extract_sets(r, p);
  CHECK(ex.n_pos_components == 3);
  auto pairs = touching_components(ex, 3);
  REQUIRE(pairs.size() == 1);  // only the pair separated by the K strip
  CHECK(ex.labels_pos[0] == pairs[0].first);
}

TEST_CASE("precondition failures") {
  ProblemConfig cfg = disk_problem(1.0, 1.0, 1.0);
  PFParams p;
  cfg.dim = 3;
  CHECK_THROWS_AS(at_minimize(cfg, spec(32, 2.0), p, 0), PreconditionError);
  cfg.dim = 2;
  p.epsilon_schedule = {2.0, 4.0};  // not decreasing
  CHECK_THROWS_AS(at_minimize(cfg, spec(32, 2.0), p, 0), PreconditionError);
  p.epsilon_schedule = {4.0, 1.0};  // below 2 dx
  CHECK_THROWS_AS(at_minimize(cfg, spec(32, 2.0), p, 0), PreconditionError);
  p.epsilon_schedule.clear();
  GridSpec tiny = spec(32, 0.5);  // does not cover Omega
  CHECK_THROWS_AS(at_minimize(cfg, tiny, p, 0), PreconditionError);
}
