#include "insulate.h"

#include <cstring>
#include <string>

#include "insulate/config.hpp"
#include "insulate/radial.hpp"
#include "insulate/runner.hpp"

struct ins_config {
  ins::Config cfg;
};

struct ins_result {
  ins::RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Maps C++ exceptions from the core onto status codes at the ABI boundary.
template <typename Fn>
ins_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ins::ConfigError& e) {
    set_error(e.what());
    return INS_ERR_CONFIG;
  } catch (const ins::PreconditionError& e) {
    set_error(e.what());
    return INS_ERR_CONFIG;
  } catch (const ins::SolverFault& e) {
    set_error(e.what());
    return INS_ERR_SOLVER;
  } catch (const std::exception& e) {
    set_error(e.what());
    return INS_ERR_SOLVER;
  }
}

ins_status copy_out(const std::string& s, char* buf, size_t buflen) {
  if (!buf || buflen == 0) {
    set_error("output buffer is null");
    return INS_ERR_INVALID;
  }
  if (s.size() + 1 > buflen) {
    set_error("output buffer too small (need " + std::to_string(s.size() + 1) + " bytes)");
    return INS_ERR_BUFFER;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return INS_OK;
}

}  // namespace

extern "C" {

const char* ins_version(void) { return ins::kVersion; }

const char* ins_last_error(void) { return g_last_error.c_str(); }

ins_status ins_config_create(ins_config** out) {
  if (!out) return INS_ERR_INVALID;
  return guarded([&] {
    *out = new ins_config{ins::Config::defaults()};
    return INS_OK;
  });
}

ins_status ins_config_load(const char* path, int strict, ins_config** out) {
  if (!out || !path) {
    set_error("null argument");
    return INS_ERR_INVALID;
  }
  return guarded([&] {
    *out = new ins_config{ins::Config::parse_file(path, strict != 0)};
    return INS_OK;
  });
}

ins_status ins_config_set(ins_config* cfg, const char* dotted_key, const char* value, int strict) {
  if (!cfg || !dotted_key || !value) {
    set_error("null argument");
    return INS_ERR_INVALID;
  }
  return guarded([&] {
    cfg->cfg.set(dotted_key, value, strict != 0);
    return INS_OK;
  });
}

ins_status ins_config_get(const ins_config* cfg, const char* dotted_key, char* buf, size_t buflen) {
  if (!cfg || !dotted_key) {
    set_error("null argument");
    return INS_ERR_INVALID;
  }
  return guarded([&] {
    const std::string dotted(dotted_key);
    const auto dot = dotted.find('.');
    if (dot == std::string::npos) throw ins::ConfigError("key must have the form section.key");
    return copy_out(cfg->cfg.get(dotted.substr(0, dot), dotted.substr(dot + 1)), buf, buflen);
  });
}

ins_status ins_config_dump(const ins_config* cfg, char* buf, size_t buflen) {
  if (!cfg) {
    set_error("null config");
    return INS_ERR_INVALID;
  }
  return guarded([&] { return copy_out(cfg->cfg.serialize(), buf, buflen); });
}

void ins_config_free(ins_config* cfg) { delete cfg; }

ins_status ins_run(const ins_config* cfg, const char* subcommand, const char* out_dir,
                   uint64_t seed, ins_result** out) {
  if (!cfg || !subcommand || !out) {
    set_error("null argument");
    return INS_ERR_INVALID;
  }
  return guarded([&] {
    ins::RunOutcome o =
        ins::run_subcommand(subcommand, cfg->cfg, out_dir ? out_dir : "", seed);
    *out = new ins_result{std::move(o)};
    return INS_OK;
  });
}

ins_status ins_result_summary(const ins_result* res, char* buf, size_t buflen) {
  if (!res) {
    set_error("null result");
    return INS_ERR_INVALID;
  }
  return copy_out(res->outcome.summary, buf, buflen);
}

ins_status ins_result_artifact_count(const ins_result* res, size_t* out) {
  if (!res || !out) {
    set_error("null argument");
    return INS_ERR_INVALID;
  }
  *out = res->outcome.artifacts.size();
  return INS_OK;
}

ins_status ins_result_artifact(const ins_result* res, size_t index, char* buf, size_t buflen) {
  if (!res) {
    set_error("null result");
    return INS_ERR_INVALID;
  }
  if (index >= res->outcome.artifacts.size()) {
    set_error("artifact index out of range");
    return INS_ERR_INVALID;
  }
  return copy_out(res->outcome.artifacts[index], buf, buflen);
}

void ins_result_free(ins_result* res) { delete res; }

ins_status ins_radial_profile(int dim, double h, double rho0, double big_r, double* coef,
                              double* u_outer) {
  return guarded([&] {
    const ins::RadialSolution s = ins::radial_profile(dim, h, rho0, big_r);
    if (coef) *coef = s.c;
    if (u_outer) *u_outer = s.u_outer;
    return INS_OK;
  });
}

ins_status ins_radial_energy(int dim, double h, double c0, double rho0, double big_r,
                             double breakdown[4]) {
  return guarded([&] {
    const ins::EnergyBreakdown e = ins::radial_energy(dim, h, c0, rho0, big_r);
    if (breakdown) {
      breakdown[0] = e.dirichlet;
      breakdown[1] = e.surface;
      breakdown[2] = e.volume;
      breakdown[3] = e.total;
    }
    return INS_OK;
  });
}

ins_status ins_optimize_radius(int dim, double h, double c0, double rho0, double* r_star,
                               double* f_star, int* interior, int* attained) {
  return guarded([&] {
    const ins::RadialOptimum o = ins::optimize_radius(dim, h, c0, rho0);
    if (r_star) *r_star = o.r_star;
    if (f_star) *f_star = o.f_star;
    if (interior) *interior = o.interior ? 1 : 0;
    if (attained) *attained = o.attained ? 1 : 0;
    return INS_OK;
  });
}

}  // extern "C"
