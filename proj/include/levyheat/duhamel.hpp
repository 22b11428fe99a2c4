#pragma once

// Perturbation series for the heat kernel of L + q on the periodic box:
//   p~(t,x,y) = sum_n p_n,   p_n(t,x,y) = int_0^t int p_{n-1}(u,x,z) q(z)
//                                           p(t-u, y-z) dz du.
// Each probe center y owns a track of grid functions x -> p~(t,x,y) stored
// on a graded time grid. Spatial convolutions ride the spectral box; the
// time integral uses composite midpoint nodes graded into both endpoints.
// When the relative-Kato reading at the requested horizon is too large the
// kernel is assembled by composing sub-horizon kernels.

#include <json.hpp>

#include "levyheat/kato.hpp"
#include "levyheat/kernel.hpp"
#include "levyheat/potential.hpp"

namespace levyheat {

struct DuhamelOptions {
  int stored_uniform = 24;
  int stored_geom_levels = 8;
  int quad_levels = 7;
  int quad_midpoints = 2;
  double series_tol = 1e-6;
  int max_terms = 40;
  double eta_split = 0.5;
  std::vector<double> probe_fractions = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0,
                                         32.0};  // +- multiples of h(t)
};

struct KappaCurve {
  std::vector<double> times;
  std::vector<double> values;
  double eta = 0.0;    // affine-envelope intercept
  double beta = 0.0;   // affine-envelope slope
  double h_eta = 0.0;  // largest tested horizon with kappa <= eta
  nlohmann::json to_json() const;
};

// kappa(t) = sup over probes (x, y) of int_0^t int p |q| p / p(t, y-x)
KappaCurve relative_kato_estimate(const SpectralBox& box, const Potential& q,
                                  const std::vector<double>& horizons,
                                  const DuhamelOptions& opts = {});

// P~_t applied to a grid function without building probe kernels
std::vector<double> semigroup_action(const SpectralBox& box,
                                     const Potential& q,
                                     const std::vector<double>& phi, double t,
                                     const DuhamelOptions& opts = {});

struct SeriesDiagnostics {
  int terms_used = 0;
  double eta_build = 0.0;  // kappa at the build horizon
  double beta = 0.0;
  double h_eta = 0.0;
  std::vector<double> term_norms;  // sup |p_n| / p at the build horizon
  double tail_bound = 0.0;
  int ck_splits = 0;
  double build_horizon = 0.0;
  nlohmann::json to_json() const;
};

class PerturbedKernel {
 public:
  static PerturbedKernel build(std::shared_ptr<SpectralBox> box, Potential q,
                               double horizon, DuhamelOptions opts = {});

  const SpectralBox& box() const { return *box_; }
  const Potential& potential() const { return q_; }
  double horizon() const { return horizon_; }
  const DuhamelOptions& options() const { return opts_; }
  const SeriesDiagnostics& diagnostics() const { return diag_; }
  const KappaCurve& kappa() const { return kappa_; }

  const std::vector<double>& probes() const { return probes_; }
  const std::vector<double>& stored_times() const { return times_; }
  // p~(t, . , y_probe) interpolated in time onto the grid
  std::vector<double> tilde_slice(std::size_t probe, double t) const;
  // free slice centered at the probe
  std::vector<double> free_slice(std::size_t probe, double t) const;

  // P~_t applied to a grid function (series + composition as needed)
  std::vector<double> apply_semigroup(const std::vector<double>& phi,
                                      double t) const;

  // inf/sup of p~/p over probes and valid grid points at time t
  FitRange ratio_range(double t) const;
  // max over probe pairs of |p~(t,x,y) - p~(t,y,x)| / p~
  double symmetry_residual(double t) const;
  // CK residual of p~ against the windowed trapezoid composition
  double ck_residual(double s, double t) const;
  // change from one more application of the Duhamel map, relative to p
  double fixed_point_residual() const;

 private:
  std::shared_ptr<SpectralBox> box_;
  Potential q_;
  std::vector<double> q_grid_;
  DuhamelOptions opts_;
  double horizon_ = 0.0;
  std::vector<double> probes_;
  std::vector<double> times_;                        // absolute, sorted
  std::vector<std::vector<std::vector<double>>> tilde_;  // [probe][time][x]
  SeriesDiagnostics diag_;
  KappaCurve kappa_;
};

// space-time test function phi(t, x) = A * bump((t-tc)/wt) * bump(|x-xc|/wx)
struct SpaceTimeBump {
  double amplitude = 1.0;
  double t_center = 0.25, t_width = 0.1;
  double x_center = 0.0, x_width = 2.0;
  double value(double t, double x) const;
  double dt(double t, double x) const;
  double space(double x) const;
  double time(double t) const;
  double time_dt(double t) const;
};

// residual of the duality identity
//   int_0^inf int p~(t,x,y) [ d_t phi(s+t,y) + L phi(s+t,y) + q phi(s+t,y) ]
//     dy dt + phi(s, x)
// for probe index `probe` (x = probe center); |residual| small verifies it
double weak_solution_residual(const PerturbedKernel& pk,
                              const SpaceTimeBump& phi, double s,
                              std::size_t probe = 0, int time_nodes = 24);

struct RegularityReport {
  double hoelder_exponent = 0.0;
  double predicted_exponent = 0.0;  // alpha1 (1 - 1/a)
  double hoelder_span_decades = 0.0;
  std::vector<double> hoelder_separations, hoelder_ratios;
  bool gradient_applicable = false;
  double gradient_constant = 0.0;
  double gradient_constant_coarse = 0.0;
  nlohmann::json to_json() const;
};

// difference-quotient exponent of p~ against the G_n envelope and the fitted
// gradient constant in |grad p~| <= C H(t)^{-1} G_n
RegularityReport regularity_report(const PerturbedKernel& pk, double t,
                                   double kato_a, double n_order);

// Hoelder seminorm of a grid function over separations up to `window`
double hoelder_seminorm(const std::vector<double>& g, double dx, double beta,
                        double window);

struct SmoothingCheck {
  std::vector<double> times;
  std::vector<double> seminorms;
  double fitted_slope = 0.0;
  double predicted_slope = 0.0;  // -(beta + d/p) against H(t)
  nlohmann::json to_json() const;
};

// seminorm decay of P~_t phi for a step input phi, fitted against H(t)
SmoothingCheck smoothing_check(std::shared_ptr<SpectralBox> box,
                               const Potential& q,
                               const std::vector<double>& times, double beta,
                               double p_norm, DuhamelOptions opts = {});

}  // namespace levyheat
