#ifndef INSULATE_RUNNER_HPP
#define INSULATE_RUNNER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "insulate/config.hpp"

namespace ins {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutcome {
  std::vector<std::string> artifacts;  // paths relative to out_dir
  std::string summary;                 // short human-readable result line(s)
};

// Executes one subcommand (radial | shape-opt | phase-field | analyze) and
// writes its artifacts plus manifest.json under out_dir. Throws ConfigError /
// PreconditionError (exit 2 at the boundary) or SolverFault (exit 3).
RunOutcome run_subcommand(const std::string& subcommand, const Config& cfg,
                          const std::string& out_dir, uint64_t seed);

}  // namespace ins

#endif
