#pragma once

// Shared numerical kit: adaptive quadrature, tail integration with geometric
// extrapolation, acceleration of alternating series (half-period sums of
// oscillatory integrals), monotone interpolation, and small fit helpers.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyheat {

struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7/15 on [a, b].
double integrate(const Fn1& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int max_depth = 48);

// Fixed 8-point Gauss-Legendre panel; no error estimate.
double gl8(const Fn1& f, double a, double b);

// Integral over [a, inf) of a non-negative integrand that is eventually
// geometrically summable over doubling panels. Extrapolates the remainder
// once the panel ratio stabilizes.
double integrate_tail(const Fn1& f, double a, double rel_tol = 1e-12);

// Euler transform of a (near-)alternating series given its raw terms.
double alternating_series_sum(const std::vector<double>& terms);

std::vector<double> logspace(double lo, double hi, int n);
std::vector<double> linspace(double lo, double hi, int n);

double median(std::vector<double> v);

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// inf/sup of a scanned ratio together with the same scan at one refinement
// level; "stable" means both envelopes moved by less than rel.
struct FitRange {
  double lo = kInf;
  double hi = -kInf;
  double lo_refined = kNaN;
  double hi_refined = kNaN;
  std::vector<double> arg_lo, arg_hi;

  void absorb(double value, std::initializer_list<double> where = {});
  bool finite() const;
  bool stable(double rel = 0.10) const;
};

// Least-squares affine envelope: minimizes sum (eta + beta t - k)^2 subject to
// eta,beta >= 0 and eta + beta t_i >= k_i for all i.
struct EnvelopeFit {
  double eta = 0.0;
  double beta = 0.0;
};
EnvelopeFit fit_affine_envelope(const std::vector<double>& t,
                                const std::vector<double>& kappa);

// Monotone (Fritsch-Carlson) cubic Hermite interpolant on sorted abscissae.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, d_;
};

// Local 4-point Lagrange interpolation on sorted abscissae (cubic away from
// the ends, degrades gracefully at the boundary).
double lagrange4(const std::vector<double>& xs, const std::vector<double>& ys,
                 double x);

struct NodeWeight {
  double x;
  double w;
};
// Composite midpoint nodes on [a, b] with geometric panel refinement (ratio
// 1/2, `levels` deep) into the flagged endpoints.
std::vector<NodeWeight> graded_midpoint_nodes(double a, double b, int levels,
                                              int per_panel, bool grade_a,
                                              bool grade_b);

// Plain chunked parallel loop. Thread count set once per process.
void set_thread_count(int n);
int thread_count();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace levyheat
