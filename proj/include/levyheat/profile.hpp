#pragma once

// Radial jump-density profiles f and the structural conditions the rest of
// the library relies on: convolution domination of the truncated tail (A),
// local scaling/doubling of f near the origin (B), and ratio monotonicity of
// shifted arguments (C). Conditions are certified numerically on declared
// scan grids; fitted constants are extrema over the scanplus one refinement.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "levyheat/numerics.hpp"

namespace levyheat {

enum class ProfileFamily { fractional, tempered, custom };

// f(r) = r^{-alpha-d} on (0,1], and e^m e^{-m r^beta} r^{-d-eta} on (1,inf),
// with a splice factor keeping f continuous at r = 1 for parameter choices
// where the clauses disagree. nu(x) = f(|x|).
struct LevyProfile {
  ProfileFamily family = ProfileFamily::fractional;
  double alpha = 1.0;   // short-range exponent, in (0,2)
  double m = 0.0;       // tempering rate
  double beta = 1.0;    // stretch exponent, in (0,1]
  double eta = 1.0;     // tail polynomial correction
  int dim = 1;          // 1..3
  double alpha1 = 1.0;  // declared lower scaling exponent
  double alpha2 = 1.0;  // declared upper scaling exponent
  std::function<double(double)> custom_fn;
  double tail_splice = 1.0;

  static LevyProfile fractional(double alpha, int dim, double eta = kNaN);
  static LevyProfile tempered(double alpha, int dim, double m, double beta,
                              double eta);
  static LevyProfile custom(std::function<double(double)> f, int dim,
                            double alpha1, double alpha2);

  void validate() const;  // throws config_error
  double operator()(double r) const { return eval(r); }
  double eval(double r) const;
};

// eval with the domain checks of the public operation surface
double eval_profile(const LevyProfile& p, double r);

// surface measure of S^{d-1}
double sphere_area(int dim);

struct ScanGrid {
  double lo = 1e-4;
  double hi = 1e2;
  int per_decade = 64;
  std::vector<double> points() const;
  std::string describe() const;
};

struct ConditionReport {
  std::string condition;  // "A", "B" or "C"
  bool passed = false;
  std::map<std::string, double> constants;
  std::vector<double> worst_point;
  std::string grid;
  nlohmann::json to_json() const;
};

// radial convolution of the tail-truncated profile against itself,
// ν_cut * ν_cut (x) with ν_cut = f(|.|) 1_{|.|>cut}, reduced to radius/angle
double truncated_profile_convolution(const LevyProfile& p, double cut,
                                     double x, double rel_tol = 1e-8);

ConditionReport check_condition_A(const LevyProfile& p,
                                  ScanGrid scan = {2.0, 50.0, 16});
ConditionReport check_condition_B(const LevyProfile& p,
                                  ScanGrid scan = {1e-4, 2.0, 64});
ConditionReport check_condition_C(const LevyProfile& p,
                                  ScanGrid scan = {1e-3, 20.0, 8});

// sup of f(r)/f(r+s) over r > 0, 0 < s <= min(R, r/2)
FitRange fit_forward_ratio(const LevyProfile& p, double R,
                           const ScanGrid& scan = {1e-3, 50.0, 32});

// sup over |x| >= cut of  nu_cut * nu_cut(x) / nu(x)
FitRange fit_truncated_convolution(const LevyProfile& p, double cut,
                                   const ScanGrid& scan = {0.0, 50.0, 16});

}  // namespace levyheat
