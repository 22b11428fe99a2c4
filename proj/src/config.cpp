#include "levyheat/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace levyheat {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) +
                         ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("line " + std::to_string(lineno) + ": empty key");
    c.kv_[key] = val;
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get(const std::string& key, const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw config_error("key '" + key + "': not a number: " + it->second);
  }
}

int Config::get_int(const std::string& key, int dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stoi(it->second);
  } catch (...) {
    throw config_error("key '" + key + "': not an integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error("key '" + key + "': not a boolean: " + it->second);
}

std::vector<double> Config::get_list(const std::string& key,
                                     std::vector<double> dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw config_error("key '" + key + "': bad list entry: " + item);
    }
  }
  return out;
}

std::vector<std::string> Config::get_words(const std::string& key) const {
  std::vector<std::string> out;
  auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double Scenario::tol(const std::string& name, double dflt) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? dflt : it->second;
}

Scenario Scenario::from_config(const Config& c,
                               std::vector<std::string>& errors) {
  Scenario s;
  s.name = c.get("scenario.name", "scenario");

  std::string family = c.get("profile.family", "fractional");
  double alpha = c.get_double("profile.alpha", 1.0);
  int dim = c.get_int("profile.dim", 1);
  double m = c.get_double("profile.m", family == "tempered" ? 1.0 : 0.0);
  double beta = c.get_double("profile.beta", 1.0);
  double eta = c.get_double("profile.eta", alpha);
  try {
    if (family == "fractional") {
      s.profile = LevyProfile::fractional(alpha, dim, eta);
    } else if (family == "tempered") {
      s.profile = LevyProfile::tempered(alpha, dim, m, beta, eta);
    } else {
      errors.push_back("profile.family: unknown family '" + family + "'");
    }
    if (c.has("profile.alpha1")) s.profile.alpha1 = c.get_double("profile.alpha1", alpha);
    if (c.has("profile.alpha2")) s.profile.alpha2 = c.get_double("profile.alpha2", alpha);
    s.profile.validate();
  } catch (const config_error& e) {
    errors.push_back(std::string("profile: ") + e.what());
  }

  std::string pform = c.get("potential.form", "none");
  try {
    if (pform == "none") {
      s.potential = Potential::none_potential(dim);
    } else if (pform == "constant") {
      s.potential = Potential::constant(c.get_double("potential.c", 1.0), dim);
    } else if (pform == "power_well") {
      s.potential = Potential::power_well(c.get_double("potential.gamma", 0.5),
                                          c.get_double("potential.cutoff", 1.0),
                                          dim);
    } else if (pform == "indicator_well") {
      s.potential = Potential::indicator_well(
          c.get_double("potential.depth", 2.0),
          c.get_double("potential.radius", 1.0), dim);
    } else {
      errors.push_back("potential.form: unknown form '" + pform + "'");
    }
  } catch (const config_error& e) {
    errors.push_back(std::string("potential: ") + e.what());
  }

  s.grid.dim = dim;
  s.grid.n = c.get_int("grid.points", 1 << 14);
  s.grid.x_max = c.get_double("grid.x_max", 0.0);
  s.u_max = c.get_double("grid.u_max", 0.0);
  if (s.grid.n < 8 || (s.grid.n & (s.grid.n - 1)) != 0)
    errors.push_back("grid.points: must be a power of two >= 8");

  s.t0 = c.get_double("time.t0", 1.0);
  s.t_min = c.get_double("time.t_min", 1e-4);
  s.t_max = c.get_double("time.t_max", 10.0);
  s.horizons = c.get_list("time.horizons", {0.05, 0.1, 0.25, 0.5});
  if (!(s.t0 > 0)) errors.push_back("time.t0: must be positive");
  for (double h : s.horizons)
    if (!(h > 0.0) || h > s.t0 + 1e-12)
      errors.push_back("time.horizons: entries must lie in (0, t0]");

  s.suites = c.get_words("suites");
  static const std::set<std::string> known{
      "conditions", "symbol", "kernel", "kato",
      "perturbation", "regularity", "oracle", "weak_solution"};
  std::set<std::string> present(s.suites.begin(), s.suites.end());
  for (const auto& suite : s.suites)
    if (!known.count(suite))
      errors.push_back("suites: unknown suite '" + suite + "'");
  auto needs = [&](const char* suite, const char* dep) {
    if (present.count(suite) && !present.count(dep))
      errors.push_back(std::string("suites: '") + suite + "' requires '" +
                       dep + "'");
  };
  needs("kernel", "symbol");
  needs("kato", "symbol");
  needs("perturbation", "kernel");
  needs("regularity", "perturbation");
  needs("weak_solution", "perturbation");
  needs("oracle", "kernel");

  for (const auto& [key, val] : c.entries()) {
    if (key.rfind("tolerances.", 0) == 0) {
      try {
        double v = std::stod(val);
        if (!(v > 0.0))
          errors.push_back(key + ": tolerance must be positive");
        s.tolerances[key.substr(11)] = v;
      } catch (...) {
        errors.push_back(key + ": not a number");
      }
    }
  }

  s.kato_a = c.get_list("kato.a", {1.0});
  for (double a : s.kato_a)
    if (a < 1.0) errors.push_back("kato.a: entries must be >= 1");

  s.oracle.dim = dim;
  s.oracle.cells = c.get_int("oracle.cells", 256);
  s.oracle.half_width = c.get_double("oracle.half_width", 20.0);

  s.out_dir = c.get("output.dir", "out");
  s.seed = std::uint64_t(c.get_int("seed", 42));
  s.threads = c.get_int("threads", 0);

  s.duhamel.series_tol = c.get_double("perturbation.series_tol", 1e-6);
  s.duhamel.stored_uniform = c.get_int("perturbation.stored_uniform", 32);
  s.duhamel.quad_levels = c.get_int("perturbation.quad_levels", 7);
  s.duhamel.quad_midpoints = c.get_int("perturbation.quad_midpoints", 3);
  s.duhamel.max_terms = c.get_int("perturbation.max_terms", 40);
  return s;
}

}  // namespace levyheat
