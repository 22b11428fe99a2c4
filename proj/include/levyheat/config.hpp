#pragma once

// Flat key-value scenario files with dotted section keys:
//   profile.family = fractional
//   profile.alpha  = 1.0
//   suites         = conditions, kernel
// '#' starts a comment; one scenario per file.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "levyheat/oracle.hpp"

namespace levyheat {

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  int get_int(const std::string& key, int dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_list(const std::string& key,
                               std::vector<double> dflt) const;
  std::vector<std::string> get_words(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct Scenario {
  std::string name = "scenario";
  LevyProfile profile = LevyProfile::fractional(1.0, 1);
  Potential potential = Potential::none_potential();
  GridSpec grid{1, 1 << 14, 0.0};  // x_max 0 = auto from 200 h(t_max)
  double u_max = 0.0;
  double t0 = 1.0;
  double t_min = 1e-4;
  double t_max = 10.0;
  std::vector<double> horizons = {0.05, 0.1, 0.25, 0.5};
  std::vector<std::string> suites;
  std::map<std::string, double> tolerances;
  std::vector<double> kato_a = {1.0};
  OracleSpec oracle{1, 256, 20.0};
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int threads = 0;
  DuhamelOptions duhamel;

  // collects every violated key instead of stopping at the first
  static Scenario from_config(const Config& c,
                              std::vector<std::string>& errors);
  double tol(const std::string& name, double dflt) const;
};

}  // namespace levyheat
