#ifndef INSULATE_CONFIG_HPP
#define INSULATE_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "insulate/phase_field.hpp"
#include "insulate/shape_opt.hpp"
#include "insulate/types.hpp"

namespace ins {

// Flat key/value configuration with [section] headers. Order-preserving so a
// dump echoes back byte-identically; strict mode rejects keys that are not
// in the built-in reference set.
class Config {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;  // 0 for programmatic entries
  };

  static Config defaults();
  static Config parse_file(const std::string& path, bool strict);
  static Config parse_string(const std::string& text, const std::string& origin, bool strict);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  // dotted = "section.key"; value checked against the reference set when
  // strict is requested.
  void set(const std::string& dotted, const std::string& value, bool strict);

  std::string serialize() const;

  const std::vector<std::pair<std::string, std::vector<Entry>>>& sections() const {
    return sections_;
  }

 private:
  void put(const std::string& section, const std::string& key, const std::string& value,
           int line = 0);
  std::vector<std::pair<std::string, std::vector<Entry>>> sections_;
};

// Builders: Config -> validated domain structures (throw ConfigError /
// PreconditionError on bad values).
ProblemConfig build_problem(const Config& c);
PFParams build_pf_params(const Config& c);
GridSpec build_grid_spec(const Config& c, const ProblemConfig& problem);
OptOptions build_opt_options(const Config& c);
StarShape build_init_shape(const Config& c, const ProblemConfig& problem);
SBVParams build_sbv_params(const Config& c);

}  // namespace ins

#endif
