#include "insulate/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "insulate/io.hpp"

namespace ins {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::defaults() {
  Config c;
  c.put("problem", "dim", "2");
  c.put("problem", "robin_h", "1.0");
  c.put("problem", "volume_cost", "1.0");
  c.put("problem", "allow_degenerate", "false");

  c.put("omega", "variant", "disk");  // disk | star | disks | mask
  c.put("omega", "center_x", "0.0");
  c.put("omega", "center_y", "0.0");
  c.put("omega", "radius", "1.0");
  c.put("omega", "cos_coefs", "");  // star: "a0,a1,..."; overrides radius
  c.put("omega", "sin_coefs", "");
  c.put("omega", "disk2_x", "0.0");  // disks: auxiliary disk (radius > 0 enables)
  c.put("omega", "disk2_y", "0.0");
  c.put("omega", "disk2_radius", "0.0");
  c.put("omega", "mask_path", "");  // mask: IFGRID 0/1 field

  c.put("solver", "n_s", "64");
  c.put("solver", "n_theta", "128");
  c.put("solver", "gap_min_rel", "0.02");

  c.put("shape", "modes", "8");
  c.put("shape", "init_radius", "1.5");
  c.put("shape", "init_mode", "0");      // k > 0 adds init_amp * cos(k theta)
  c.put("shape", "init_amp", "0.0");
  c.put("shape", "grad_tol_rel", "2e-4");
  c.put("shape", "max_iter", "300");

  c.put("phase_field", "nx", "256");
  c.put("phase_field", "ny", "256");
  c.put("phase_field", "half_width", "3.2");  // grid spans center +/- half_width
  c.put("phase_field", "eps_schedule", "");   // dx multiples, csv; empty = 4 -> 2 geometric
  c.put("phase_field", "k_eps", "1e-6");
  c.put("phase_field", "w_mult", "1.0");
  c.put("phase_field", "weight_form", "quad");  // quad (2u^2) | trace-proxy
  c.put("phase_field", "reaction_floor", "0.05");
  c.put("phase_field", "delta_cut", "0.05");
  c.put("phase_field", "z_cut", "0.5");
  c.put("phase_field", "max_alternations", "40");
  c.put("phase_field", "alt_tol", "1e-5");
  c.put("phase_field", "noise_amp", "0.0");
  c.put("phase_field", "sbv_tau", "0.3");

  c.put("analysis", "op", "lower-bound");  // lower-bound | density | blowup | holes
  c.put("analysis", "field", "");
  c.put("analysis", "delta_cut", "0.05");
  c.put("analysis", "tau", "0.3");
  c.put("analysis", "point_x", "nan");  // nan = pick a jump-face midpoint
  c.put("analysis", "point_y", "nan");
  c.put("analysis", "radii", "");  // csv, physical lengths; empty = auto
  c.put("analysis", "eps_flat", "0.1");

  c.put("output", "dir", "");
  return c;
}

void Config::put(const std::string& section, const std::string& key, const std::string& value,
                 int line) {
  for (auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (auto& e : entries) {
      if (e.key == key) {
        e.value = value;
        if (line) e.line = line;
        return;
      }
    }
    entries.push_back({key, value, line});
    return;
  }
  sections_.push_back({section, {{key, value, line}}});
}

bool Config::has(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections_)
    if (name == section)
      for (const auto& e : entries)
        if (e.key == key) return true;
  return false;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections_)
    if (name == section)
      for (const auto& e : entries)
        if (e.key == key) return e.value;
  throw ConfigError("missing config key [" + section + "] " + key);
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key [" + section + "] " + key + " = '" + v + "' is not a number");
  }
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key [" + section + "] " + key + " = '" + v + "' is not an integer");
  }
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key [" + section + "] " + key + " = '" + v + "' is not a boolean");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config key [" + section + "] " + key + ": bad list element '" + item + "'");
    }
  }
  return out;
}

void Config::set(const std::string& dotted, const std::string& value, bool strict) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override '" + dotted + "' must have the form section.key");
  const std::string section = dotted.substr(0, dot), key = dotted.substr(dot + 1);
  if (strict && !Config::defaults().has(section, key))
    throw ConfigError("unknown config key [" + section + "] " + key);
  put(section, key, value);
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [name, entries] : sections_) {
    out += "[" + name + "]\n";
    for (const auto& e : entries) out += e.key + " = " + e.value + "\n";
    out += "\n";
  }
  return out;
}

Config Config::parse_string(const std::string& text, const std::string& origin, bool strict) {
  Config c = defaults();
  const Config ref = defaults();
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "' outside any [section]");
    if (strict && !ref.has(section, key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key [" + section +
                        "] " + key);
    c.put(section, key, value, lineno);
  }
  return c;
}

Config Config::parse_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path, strict);
}

ProblemConfig build_problem(const Config& c) {
  ProblemConfig p;
  p.dim = c.get_int("problem", "dim");
  p.robin_h = c.get_double("problem", "robin_h");
  p.volume_cost = c.get_double("problem", "volume_cost");
  p.allow_degenerate = c.get_bool("problem", "allow_degenerate");

  const std::string variant = c.get("omega", "variant");
  const Point center{c.get_double("omega", "center_x"), c.get_double("omega", "center_y")};
  if (variant == "disk") {
    p.omega = OmegaSpec::disk(center, c.get_double("omega", "radius"));
  } else if (variant == "star") {
    const std::vector<double> cosc = c.get_list("omega", "cos_coefs");
    const std::vector<double> sinc = c.get_list("omega", "sin_coefs");
    if (cosc.empty()) throw ConfigError("[omega] cos_coefs required for the star variant");
    p.omega.variant = OmegaSpec::Variant::Star;
    p.omega.center = center;
    StarShape s(center, std::max(cosc.size(), sinc.size() + 1) - 1, cosc[0]);
    for (size_t k = 1; k < cosc.size(); ++k) s.cos_coef[k] = cosc[k];
    for (size_t k = 0; k < sinc.size(); ++k) s.sin_coef[k + 1] = sinc[k];
    p.omega.star = s;
  } else if (variant == "disks") {
    p.omega.variant = OmegaSpec::Variant::Disks;
    p.omega.center = center;
    p.omega.disks = {{center, c.get_double("omega", "radius")}};
    const double r2 = c.get_double("omega", "disk2_radius");
    if (r2 > 0.0)
      p.omega.disks.push_back(
          {{c.get_double("omega", "disk2_x"), c.get_double("omega", "disk2_y")}, r2});
  } else if (variant == "mask") {
    p.omega.variant = OmegaSpec::Variant::GridMask;
    p.omega.center = center;
    const std::string path = c.get("omega", "mask_path");
    if (path.empty()) throw ConfigError("[omega] mask_path required for the mask variant");
    p.omega.mask = read_grid(path);
  } else {
    throw ConfigError("[omega] variant must be disk, star, disks or mask (got '" + variant + "')");
  }
  p.validate();
  return p;
}

PFParams build_pf_params(const Config& c) {
  PFParams p;
  p.epsilon_schedule = c.get_list("phase_field", "eps_schedule");
  p.k_eps = c.get_double("phase_field", "k_eps");
  p.w_mult = c.get_double("phase_field", "w_mult");
  const std::string wf = c.get("phase_field", "weight_form");
  if (wf == "quad")
    p.weight_form = PFParams::WeightForm::QuadDouble;
  else if (wf == "trace-proxy")
    p.weight_form = PFParams::WeightForm::TraceProxy;
  else
    throw ConfigError("[phase_field] weight_form must be quad or trace-proxy");
  p.reaction_floor = c.get_double("phase_field", "reaction_floor");
  p.delta_cut = c.get_double("phase_field", "delta_cut");
  p.z_cut = c.get_double("phase_field", "z_cut");
  p.max_alternations = c.get_int("phase_field", "max_alternations");
  p.alt_tol = c.get_double("phase_field", "alt_tol");
  p.noise_amp = c.get_double("phase_field", "noise_amp");
  p.sbv_tau = c.get_double("phase_field", "sbv_tau");
  p.validate();
  return p;
}

GridSpec build_grid_spec(const Config& c, const ProblemConfig& problem) {
  GridSpec g;
  g.nx = c.get_int("phase_field", "nx");
  g.ny = c.get_int("phase_field", "ny");
  if (g.nx < 8 || g.ny < 8) throw ConfigError("[phase_field] nx, ny must be at least 8");
  const double hw = c.get_double("phase_field", "half_width");
  if (!(hw > 0.0)) throw ConfigError("[phase_field] half_width must be positive");
  g.x0 = problem.omega.center.x - hw;
  g.y0 = problem.omega.center.y - hw;
  g.dx = 2.0 * hw / g.nx;
  g.dy = 2.0 * hw / g.ny;
  return g;
}

OptOptions build_opt_options(const Config& c) {
  OptOptions o;
  o.n_s = c.get_int("solver", "n_s");
  o.n_theta = c.get_int("solver", "n_theta");
  o.grad_tol_rel = c.get_double("shape", "grad_tol_rel");
  o.max_iter = c.get_int("shape", "max_iter");
  return o;
}

StarShape build_init_shape(const Config& c, const ProblemConfig& problem) {
  StarShape s(problem.omega.center, c.get_int("shape", "modes"),
              c.get_double("shape", "init_radius"));
  const int k = c.get_int("shape", "init_mode");
  const double amp = c.get_double("shape", "init_amp");
  if (k > 0) {
    if (k > s.modes())
      throw ConfigError("[shape] init_mode exceeds the configured mode count");
    s.cos_coef[k] = amp;
  }
  return s;
}

SBVParams build_sbv_params(const Config& c) {
  SBVParams p;
  p.jump_threshold = c.get_double("analysis", "tau");
  p.positivity_cut = c.get_double("analysis", "delta_cut");
  p.validate();
  return p;
}

}  // namespace ins
