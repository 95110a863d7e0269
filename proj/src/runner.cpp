#include "insulate/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "insulate/analysis.hpp"
#include "insulate/io.hpp"
#include "insulate/radial.hpp"

namespace ins {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Emitter {
  fs::path dir;
  std::vector<std::string> artifacts;

  std::string path(const std::string& name) {
    artifacts.push_back(name);
    return (dir / name).string();
  }
};

json energy_json(const EnergyBreakdown& e) {
  return {{"dirichlet", e.dirichlet}, {"surface", e.surface}, {"volume", e.volume}, {"total", e.total}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
}

RunOutcome run_radial(const Config& c, Emitter& em) {
  const ProblemConfig p = build_problem(c);
  if (!p.omega.star_shaped() && p.omega.variant != OmegaSpec::Variant::Disks)
    throw PreconditionError("radial: Omega must be a disk");
  const double rho0 = (p.omega.variant == OmegaSpec::Variant::Disks) ? p.omega.disks.front().second
                                                                     : p.omega.radius;

  const RadialOptimum opt = optimize_radius(p.dim, p.robin_h, p.volume_cost, rho0);

  {
    std::ofstream sweep(em.path("radial_sweep.csv"));
    sweep << "R,dirichlet,surface,volume,total\n";
    const int rows = 200;
    char buf[256];
    for (int k = 0; k <= rows; ++k) {
      const double r = rho0 + (opt.r_max - rho0) * k / rows;
      const EnergyBreakdown e = radial_energy(p.dim, p.robin_h, p.volume_cost, rho0, r);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r, e.dirichlet, e.surface,
                    e.volume, e.total);
      sweep << buf;
    }
  }
  {
    std::ofstream out(em.path("radial_optimum.csv"));
    out << "r_star,f_star,dirichlet,surface,volume,interior,attained,delta_radial\n";
    char buf[320];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g\n", opt.r_star,
                  opt.f_star, opt.energy.dirichlet, opt.energy.surface, opt.energy.volume,
                  opt.interior ? 1 : 0, opt.attained ? 1 : 0, opt.delta_radial);
    out << buf;
  }

  std::ostringstream sum;
  sum << "radial: R* = " << opt.r_star << ", F* = " << opt.f_star
      << (opt.interior ? " (interior optimum)" : " (detached, A = Omega)");
  if (!opt.warning.empty()) sum << " [" << opt.warning << "]";
  return {{}, sum.str()};
}

RunOutcome run_shape_opt(const Config& c, Emitter& em) {
  const ProblemConfig p = build_problem(c);
  const OptOptions opts = build_opt_options(c);
  const StarShape init = build_init_shape(c, p);

  const OptResult r = optimize_shape(p, init, opts);

  TraceWriter trace(em.path("trace.csv"));
  for (const TraceRow& row : r.trace) trace.row(row.iter, row.energy, row.grad_norm);

  {
    std::ofstream out(em.path("boundary.csv"));
    out << "theta,r,rho_omega\n";
    char buf[160];
    for (int j = 0; j < 512; ++j) {
      const double th = kTwoPi * j / 512;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", th, r.reported_radius(th, p.omega),
                    p.omega.star_shaped() ? p.omega.boundary_radius(th) : 0.0);
      out << buf;
    }
  }

  json j;
  j["converged"] = r.converged;
  j["detached"] = r.detached;
  j["tie"] = r.tie;
  j["attached_energy"] = r.attached_energy;
  j["detached_energy"] = r.detached_energy;
  j["final_energy"] = energy_json(r.final_energy);
  j["stationarity_residual"] = r.stationarity_residual;
  j["cos_coefs"] = r.shape.cos_coef;
  j["sin_coefs"] = r.shape.sin_coef;
  write_text(em.path("shape_result.json"), j.dump(2) + "\n");

  std::ostringstream sum;
  sum << "shape-opt: F = " << r.final_energy.total
      << (r.detached ? " (detached competitor A = Omega)" : " (attached optimum)")
      << ", stationarity sup|g| = " << r.stationarity_residual
      << (r.converged ? "" : " [not converged]");
  return {{}, sum.str()};
}

RunOutcome run_phase_field(const Config& c, Emitter& em, uint64_t seed) {
  const ProblemConfig p = build_problem(c);
  const PFParams pf = build_pf_params(c);
  const GridSpec grid = build_grid_spec(c, p);

  const PhaseFieldResult r = at_minimize(p, grid, pf, seed);
  const GridField ext = extracted_field(r, pf);
  const ExtractResult sets = extract_sets(r, pf);

  write_grid(em.path("u.grid"), r.u);
  write_grid(em.path("z.grid"), r.z);
  write_grid(em.path("u_extracted.grid"), ext);
  write_grid(em.path("a_mask.grid"), r.a_mask);
  write_grid(em.path("k_mask.grid"), r.k_mask);

  {
    std::ofstream out(em.path("stages.csv"));
    out << "eps,alternations,f_eps,sharp_dirichlet,sharp_surface,sharp_volume,sharp_total\n";
    char buf[320];
    for (const StageTrace& st : r.stages) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", st.eps,
                    st.f_eps.size() - 1, st.f_eps.back(), st.sharp_extracted.dirichlet,
                    st.sharp_extracted.surface, st.sharp_extracted.volume,
                    st.sharp_extracted.total);
      out << buf;
    }
  }

  // multiplicity-2 faces on the raw relaxed field (both sides positive)
  double m2_len = 0.0;
  for (const JumpFace& f : detect_jump_faces(r.u, pf.sbv_tau))
    if (f.u1 > pf.delta_cut && f.u2 > pf.delta_cut) m2_len += f.length;

  // strip bound: two flanking z-ridges of a double-sided interface (~6 eps)
  const auto touching = touching_components(
      sets, static_cast<int>(std::ceil(6.0 * pf.schedule_or_default().back())));
  const LowerBoundReport lb = check_lower_bound(ext, pf.delta_cut);

  json j;
  j["f_eps_final"] = r.stages.back().f_eps.back();
  j["sharp_extracted"] = energy_json(r.stages.back().sharp_extracted);
  j["positive_components"] = sets.n_pos_components;
  j["zero_components"] = sets.n_zero_components;
  j["touching_pairs"] = json::array();
  for (const auto& [a, b] : touching) j["touching_pairs"].push_back({a, b});
  j["multiplicity2_length"] = m2_len;
  j["delta_obs"] = lb.delta_obs;
  j["gap_mass"] = lb.gap_mass;
  j["seed"] = seed;
  j["alternations"] = r.total_alternations;
  write_text(em.path("pf_result.json"), j.dump(2) + "\n");

  std::ostringstream sum;
  sum << "phase-field: F_eps = " << r.stages.back().f_eps.back()
      << ", sharp(extracted) = " << r.stages.back().sharp_extracted.total
      << ", components = " << sets.n_pos_components << ", delta_obs = " << lb.delta_obs;
  return {{}, sum.str()};
}

RunOutcome run_analyze(const Config& c, Emitter& em) {
  const std::string field_path = c.get("analysis", "field");
  if (field_path.empty()) throw ConfigError("[analysis] field: path to a stored grid is required");
  const GridField u = read_grid(field_path);
  const std::string op = c.get("analysis", "op");
  const double delta_cut = c.get_double("analysis", "delta_cut");
  const double tau = c.get_double("analysis", "tau");

  json j;
  j["op"] = op;
  j["field"] = field_path;
  std::ostringstream sum;

  if (op == "lower-bound") {
    const LowerBoundReport rep = check_lower_bound(u, delta_cut);
    j["delta_obs"] = rep.delta_obs;
    j["gap_mass"] = rep.gap_mass;
    j["halo_budget"] = rep.halo_budget;
    j["violation"] = rep.violation;
    j["empty"] = rep.empty;
    sum << "lower-bound: delta_obs = " << rep.delta_obs << ", gap_mass = " << rep.gap_mass
        << (rep.violation ? " VIOLATION" : "");
  } else if (op == "density") {
    const auto faces = detect_jump_faces(u, tau);
    if (faces.empty()) throw PreconditionError("density: no jump faces detected in the field");
    std::vector<double> radii = c.get_list("analysis", "radii");
    if (radii.empty()) {
      const double r0 = 8.0 * std::max(u.dx, u.dy);
      radii = {r0, 2.0 * r0, 4.0 * r0};
    }
    std::vector<Point> points;
    const size_t stride = std::max<size_t>(1, faces.size() / 24);
    for (size_t k = 0; k < faces.size(); k += stride) points.push_back({faces[k].mid_x, faces[k].mid_y});
    const DensityReport rep = density_profile(faces, u, points, radii);
    j["min_ratio"] = rep.min_ratio;
    j["max_ratio"] = rep.max_ratio;
    j["n_skipped"] = rep.n_skipped;
    j["entries"] = json::array();
    for (const auto& e : rep.entries)
      j["entries"].push_back({{"x", e.point.x}, {"y", e.point.y}, {"r", e.r}, {"ratio", e.ratio},
                              {"skipped", e.skipped}});
    sum << "density: ratios in [" << rep.min_ratio << ", " << rep.max_ratio << "] over "
        << rep.entries.size() << " samples";
  } else if (op == "blowup") {
    const auto faces = detect_jump_faces(u, tau);
    double px = c.get_double("analysis", "point_x"), py = c.get_double("analysis", "point_y");
    if (std::isnan(px) || std::isnan(py)) {
      if (faces.empty()) throw PreconditionError("blowup: no jump faces to pick a point from");
      px = faces[faces.size() / 2].mid_x;
      py = faces[faces.size() / 2].mid_y;
    }
    std::vector<double> radii = c.get_list("analysis", "radii");
    if (radii.empty()) {
      const double r0 = 16.0 * std::max(u.dx, u.dy);
      radii = {4.0 * r0, 2.0 * r0, r0};
    }
    const BlowupReport rep =
        blowup_scan(u, faces, {px, py}, radii, tau, c.get_double("analysis", "eps_flat"));
    j["point"] = {{"x", px}, {"y", py}};
    j["radii"] = rep.radii;
    j["e_r"] = rep.e_r;
    j["flatness"] = rep.flatness;
    j["zeta_obs"] = rep.zeta_obs;
    const char* names[] = {"flat-candidate", "singular-candidate", "unresolved"};
    j["classification"] = names[static_cast<int>(rep.classification)];
    sum << "blowup at (" << px << ", " << py << "): " << names[static_cast<int>(rep.classification)];
  } else if (op == "holes") {
    // zero-phase components of the stored field
    std::vector<char> in_zero(u.values.size(), 0);
    for (size_t k = 0; k < u.values.size(); ++k) in_zero[k] = u.values[k] <= delta_cut;
    std::vector<int> labels(u.values.size(), -1);
    int next = 0;
    // reuse the 4-connected labeling from analysis via a small local pass
    for (int jj = 0; jj < u.ny; ++jj)
      for (int ii = 0; ii < u.nx; ++ii) {
        const size_t idx = static_cast<size_t>(jj) * u.nx + ii;
        if (!in_zero[idx] || labels[idx] >= 0) continue;
        std::vector<std::pair<int, int>> stack = {{ii, jj}};
        labels[idx] = next;
        while (!stack.empty()) {
          auto [ci, cj] = stack.back();
          stack.pop_back();
          const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
          for (int d = 0; d < 4; ++d) {
            const int ni = ci + di[d], nj = cj + dj[d];
            if (ni < 0 || nj < 0 || ni >= u.nx || nj >= u.ny) continue;
            const size_t nidx = static_cast<size_t>(nj) * u.nx + ni;
            if (in_zero[nidx] && labels[nidx] < 0) {
              labels[nidx] = next;
              stack.push_back({ni, nj});
            }
          }
        }
        ++next;
      }
    const auto holes = hole_geometry(labels, next, u);
    j["holes"] = json::array();
    for (const auto& hrep : holes)
      j["holes"].push_back({{"component", hrep.component},
                            {"area", hrep.area},
                            {"perimeter", hrep.perimeter},
                            {"convexity_defect", hrep.convexity_defect},
                            {"roundness", hrep.roundness},
                            {"skipped", hrep.skipped}});
    sum << "holes: " << holes.size() << " components analyzed";
  } else {
    throw ConfigError("[analysis] op must be lower-bound, density, blowup or holes (got '" + op +
                      "')");
  }

  write_text(em.path("analyze_report.json"), j.dump(2) + "\n");
  return {{}, sum.str()};
}

}  // namespace

RunOutcome run_subcommand(const std::string& subcommand, const Config& cfg,
                          const std::string& out_dir, uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();

  std::string dir = out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("INSULATE_OUT")) dir = env;
  }
  if (dir.empty()) dir = cfg.get("output", "dir");
  if (dir.empty()) dir = "out";
  fs::create_directories(dir);

  Emitter em;
  em.dir = dir;

  RunOutcome out;
  if (subcommand == "radial")
    out = run_radial(cfg, em);
  else if (subcommand == "shape-opt")
    out = run_shape_opt(cfg, em);
  else if (subcommand == "phase-field")
    out = run_phase_field(cfg, em, seed);
  else if (subcommand == "analyze")
    out = run_analyze(cfg, em);
  else
    throw ConfigError("unknown subcommand '" + subcommand +
                      "' (expected radial, shape-opt, phase-field or analyze)");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["tool"] = "insulate";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["seed"] = seed;
  manifest["wall_time_s"] = wall;
  json jc;
  for (const auto& [name, entries] : cfg.sections()) {
    json sec;
    for (const auto& e : entries) sec[e.key] = e.value;
    jc[name] = sec;
  }
  manifest["config"] = jc;
  manifest["artifacts"] = json::array();
  for (const std::string& name : em.artifacts)
    manifest["artifacts"].push_back(
        {{"path", name}, {"fnv1a64", checksum_hex(file_checksum((fs::path(dir) / name).string()))}});
  write_text((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  em.artifacts.push_back("manifest.json");

  out.artifacts = em.artifacts;
  return out;
}

}  // namespace ins
