// insulate command-line front end. Talks to the core exclusively through the
// C API in insulate.h; exit codes: 0 success, 2 config/precondition errors,
// 3 solver faults.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "insulate.h"

namespace {

int map_exit(ins_status st) {
  switch (st) {
    case INS_OK:
      return 0;
    case INS_ERR_SOLVER:
      return 3;
    default:
      return 2;
  }
}

int run_one(const std::string& subcommand, const std::string& config_path,
            const std::string& out_dir, unsigned long long seed,
            const std::vector<std::string>& overrides, bool strict) {
  ins_config* cfg = nullptr;
  ins_status st = config_path.empty() ? ins_config_create(&cfg)
                                      : ins_config_load(config_path.c_str(), strict ? 1 : 0, &cfg);
  if (st != INS_OK) {
    std::fprintf(stderr, "error: %s\n", ins_last_error());
    return map_exit(st);
  }

  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects section.key=value (got '%s')\n", kv.c_str());
      ins_config_free(cfg);
      return 2;
    }
    st = ins_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str(), strict ? 1 : 0);
    if (st != INS_OK) {
      std::fprintf(stderr, "error: %s\n", ins_last_error());
      ins_config_free(cfg);
      return map_exit(st);
    }
  }

  ins_result* res = nullptr;
  st = ins_run(cfg, subcommand.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), seed, &res);
  ins_config_free(cfg);
  if (st != INS_OK) {
    std::fprintf(stderr, "error: %s\n", ins_last_error());
    return map_exit(st);
  }

  char buf[4096];
  if (ins_result_summary(res, buf, sizeof buf) == INS_OK) std::printf("%s\n", buf);
  size_t n = 0;
  ins_result_artifact_count(res, &n);
  for (size_t k = 0; k < n; ++k)
    if (ins_result_artifact(res, k, buf, sizeof buf) == INS_OK)
      std::printf("  wrote %s\n", buf);
  ins_result_free(res);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("insulate ") + ins_version() +
               " - thermal-insulation free-boundary optimizer and verification suite"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned long long seed = 0;
  std::vector<std::string> overrides;
  bool strict = false;

  app.add_option("--config", config_path, "configuration file (key = value with [section] headers)");
  app.add_option("--out", out_dir, "output directory (fallback: $INSULATE_OUT, then [output] dir)");
  app.add_option("--seed", seed, "random seed for noise-perturbed starts");
  app.add_option("--set", overrides, "override section.key=value (repeatable)");
  app.add_flag("--strict", strict, "reject unknown config keys");

  const char* subs[] = {"radial", "shape-opt", "phase-field", "analyze"};
  const char* desc[] = {"closed-form radial oracle sweep and optimum",
                        "star-shaped gradient descent on the sharp energy",
                        "topology-flexible elliptic relaxation on a grid",
                        "structure reports on stored fields"};
  for (int k = 0; k < 4; ++k) app.add_subcommand(subs[k], desc[k])->fallthrough();

  // convenience aliases for analyze inputs
  std::string field, op;
  app.add_option("--field", field, "analyze: path to a stored IFGRID field");
  app.add_option("--op", op, "analyze: lower-bound | density | blowup | holes");

  CLI11_PARSE(app, argc, argv);

  if (!field.empty()) overrides.push_back("analysis.field=" + field);
  if (!op.empty()) overrides.push_back("analysis.op=" + op);

  for (int k = 0; k < 4; ++k)
    if (app.got_subcommand(subs[k]))
      return run_one(subs[k], config_path, out_dir, seed, overrides, strict);
  return 2;
}
