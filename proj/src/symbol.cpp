#include "levyheat/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levyheat {

namespace {

constexpr double kPi = 3.14159265358979323846;

// rough short-range exponent of f, used only to size the log-integration window
double short_range_exponent(const LevyProfile& p) {
  if (p.family != ProfileFamily::custom) return p.alpha + p.dim;
  double f1 = p.eval(1e-9), f2 = p.eval(2e-9);
  return std::log(f1 / f2) / std::log(2.0);
}

}  // namespace

double spherical_cos_average(int d, double s) {
  s = std::abs(s);
  switch (d) {
    case 1:
      return std::cos(s);
    case 2:
      return std::cyl_bessel_j(0.0, s);
    default:
      return s < 1e-8 ? 1.0 - s * s / 6.0 : std::sin(s) / s;
  }
}

double one_minus_spherical_cos_average(int d, double s) {
  s = std::abs(s);
  if (d == 1) {
    double half = std::sin(0.5 * s);
    return 2.0 * half * half;
  }
  if (s < 0.5) {
    double z = s * s;
    if (d == 2) return z / 4.0 - z * z / 64.0 + z * z * z / 2304.0;
    return z / 6.0 - z * z / 120.0 + z * z * z / 5040.0;
  }
  return 1.0 - spherical_cos_average(d, s);
}

double spherical_cos_average_zero(int d, int k) {
  switch (d) {
    case 1:
      return (k - 0.5) * kPi;
    case 2: {
      double b = (k - 0.25) * kPi;
      return b + 1.0 / (8.0 * b);  // McMahon expansion of j_{0,k}
    }
    default:
      return k * kPi;
  }
}

double spherical_cos_average_derivative(int d, double s) {
  s = std::abs(s);
  switch (d) {
    case 1:
      return -std::sin(s);
    case 2:
      return -std::cyl_bessel_j(1.0, s);
    default:
      if (s < 1e-4) return -s / 3.0 + s * s * s / 30.0;
      return std::cos(s) / s - std::sin(s) / (s * s);
  }
}

double spherical_cos_average_derivative_zero(int d, int k) {
  switch (d) {
    case 1:
      return k * kPi;
    case 2: {
      double b = (k + 0.25) * kPi;
      return b - 3.0 / (8.0 * b);  // j_{1,k}
    }
    default: {
      // roots of tan s = s
      double b = (k + 0.5) * kPi;
      return b - 1.0 / b;
    }
  }
}

double compute_symbol(const LevyProfile& p, double u, double rel_tol) {
  if (!(u >= 0.0)) throw std::domain_error("symbol argument must be >= 0");
  if (u == 0.0) return 0.0;
  const int d = p.dim;
  const double r0 = spherical_cos_average_zero(d, 1) / u;

  // smooth core on (0, r0), integrated in the log variable so the
  // r^{1-alpha}-type vanishing near zero converges for every alpha < 2
  const double decay = std::max(0.05, 2.0 - (short_range_exponent(p) - d));
  const double window = std::max(40.0, 45.0 / decay);
  auto core = [&](double x) {
    double r = std::exp(x);
    return p.eval(r) * std::pow(r, d) * one_minus_spherical_cos_average(d, u * r);
  };
  double head = integrate(core, std::log(r0) - window, std::log(r0),
                          0.1 * rel_tol, 0.0);

  // plain tail mass of f r^{d-1} beyond r0
  auto mass = [&](double r) { return p.eval(r) * std::pow(r, d - 1); };
  double tail_mass = integrate_tail(mass, r0, 1e-13);

  // oscillatory correction: alternating half-period contributions
  std::vector<double> terms;
  terms.reserve(64);
  double scale = head + tail_mass;
  for (int k = 1; k <= 64; ++k) {
    double a = spherical_cos_average_zero(d, k) / u;
    double b = spherical_cos_average_zero(d, k + 1) / u;
    double t = gl8([&](double r) { return mass(r) * spherical_cos_average(d, u * r); },
                   a, b);
    terms.push_back(t);
    if (std::abs(t) < 1e-18 * scale) break;
  }
  double osc = alternating_series_sum(terms);

  return sphere_area(d) * (head + tail_mass - osc);
}

SymbolTable SymbolTable::build(const LevyProfile& p, SymbolTableOptions opts) {
  SymbolTable t;
  t.profile_ = p;
  t.opts_ = opts;

  double u_lo = opts.u_min;
  if (u_lo <= 0.0) {
    u_lo = 1e-2;
    while (compute_symbol(p, u_lo, 1e-6) > 1e-3 / opts.t_max) u_lo *= 0.5;
  }
  double u_hi = opts.u_max;
  if (u_hi <= 0.0) {
    // cover both the majorant inverse at 1/t_min and pointwise inversion at
    // t = t_min, which needs the multiplier to die out inside the table
    u_hi = 1e2;
    while (compute_symbol(p, u_hi, 1e-6) < 55.0 / opts.t_min) {
      u_hi *= 2.0;
      if (u_hi > 1e15)
        throw numerical_error("symbol grows too slowly to cover t_min");
    }
    u_hi *= 2.0;
  }

  int decades = int(std::ceil(std::log10(u_hi / u_lo)));
  int n = std::max(16, decades * opts.per_decade + 1);
  t.u_grid_ = logspace(u_lo, u_hi, n);
  t.phi_vals_.resize(n);
  parallel_for(n, [&](std::size_t i) {
    t.phi_vals_[i] = compute_symbol(p, t.u_grid_[i], opts.quad_rel_tol);
  });

  t.psi_env_.resize(n);
  double run = 0.0;
  for (int i = 0; i < n; ++i) {
    run = std::max(run, t.phi_vals_[i]);
    t.psi_env_[i] = run;
  }

  t.log_u_.resize(n);
  t.log_phi_.resize(n);
  std::vector<double> log_psi(n);
  for (int i = 0; i < n; ++i) {
    t.log_u_[i] = std::log(t.u_grid_[i]);
    t.log_phi_[i] = std::log(t.phi_vals_[i]);
    log_psi[i] = std::log(t.psi_env_[i]);
  }
  t.psi_pchip_ = Pchip(t.log_u_, log_psi);
  return t;
}

double SymbolTable::phi(double u) const {
  if (u == 0.0) return 0.0;
  if (u < u_min() || u > u_max())
    throw std::out_of_range("symbol table does not cover u=" +
                            std::to_string(u));
  return std::exp(lagrange4(log_u_, log_phi_, std::log(u)));
}

double SymbolTable::phi_extended(double u) const {
  if (u == 0.0) return 0.0;
  if (u >= u_min()) return phi(u);
  double slope = (log_phi_[1] - log_phi_[0]) / (log_u_[1] - log_u_[0]);
  slope = std::clamp(slope, 0.0, 2.0);
  return phi_vals_.front() * std::pow(u / u_min(), slope);
}

double SymbolTable::psi(double r) const {
  if (r < u_min() || r > u_max())
    throw std::out_of_range("psi table does not cover r=" + std::to_string(r));
  return std::exp(psi_pchip_(std::log(r)));
}

double SymbolTable::psi_inv(double s) const {
  if (s < psi_env_.front() || s > psi_env_.back())
    throw std::out_of_range("psi range does not cover s=" + std::to_string(s));
  // rightmost index with envelope value <= s
  auto it = std::upper_bound(psi_env_.begin(), psi_env_.end(), s);
  std::size_t j = (it - psi_env_.begin());
  if (j == 0) return u_grid_.front();
  --j;  // psi_env_[j] <= s < psi_env_[j+1] (or j is the last index)
  if (j + 1 >= u_grid_.size()) return u_grid_.back();
  if (psi_env_[j] == s) return u_grid_[j];
  // bisect the monotone interpolant on [u_j, u_{j+1}]
  double lo = log_u_[j], hi = log_u_[j + 1];
  double ls = std::log(s);
  for (int it2 = 0; it2 < 80; ++it2) {
    double mid = 0.5 * (lo + hi);
    if (psi_pchip_(mid) <= ls)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(lo);
}

double SymbolTable::h(double t) const {
  if (!(t > 0)) throw std::domain_error("h wants t > 0");
  return 1.0 / psi_inv(1.0 / t);
}

double SymbolTable::g(double s) const {
  return std::pow(s, profile_.dim) * profile_.eval(s);
}

double SymbolTable::g_inv(double v) const {
  double g2 = g(2.0);
  if (v < g2)
    throw std::out_of_range("g inverse defined on [g(2), inf)");
  double lo = std::log(1e-14), hi = std::log(2.0);
  // g is decreasing on (0, 2]
  if (g(std::exp(lo)) < v)
    throw numerical_error("g inverse: value out of reach");
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g(std::exp(mid)) >= v)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double SymbolTable::H(double t) const {
  if (!(t > 0)) throw std::domain_error("H wants t > 0");
  double g2 = g(2.0);
  double t_knee = 1.0 / g2;
  if (t <= t_knee) return g_inv(1.0 / t);
  // continuous increasing linear extension with the left-hand slope
  double eps = 1e-6 * t_knee;
  double slope = (g_inv(1.0 / t_knee) - g_inv(1.0 / (t_knee - eps))) / eps;
  if (!(slope > 0)) slope = 2.0 / t_knee;
  return 2.0 + slope * (t - t_knee);
}

std::string SymbolTable::dump_csv(int samples_per_decade) const {
  std::ostringstream os;
  os.precision(12);
  os << "quantity,argument,value\n";
  auto us = logspace(u_min(), u_max(),
                     int(std::log10(u_max() / u_min()) * samples_per_decade));
  for (double u : us) os << "phi," << u << "," << phi(u) << "\n";
  for (double u : us) os << "psi," << u << "," << psi(u) << "\n";
  auto ss = logspace(psi_env_.front() * 1.0001, psi_env_.back() * 0.9999,
                     int(std::log10(psi_env_.back() / psi_env_.front()) *
                         samples_per_decade));
  for (double s : ss) os << "psi_inv," << s << "," << psi_inv(s) << "\n";
  auto ts = logspace(opts_.t_min, opts_.t_max,
                     int(std::log10(opts_.t_max / opts_.t_min) *
                         samples_per_decade));
  for (double t : ts) os << "h," << t << "," << h(t) << "\n";
  for (double t : ts) os << "H," << t << "," << H(t) << "\n";
  for (double s : logspace(1e-3, 2.0, 3 * samples_per_decade))
    os << "g," << s << "," << g(s) << "\n";
  return os.str();
}

namespace {

FitRange with_refinement(const std::function<FitRange(int)>& run, int base_n) {
  FitRange base = run(base_n);
  FitRange fine = run(base_n * 2);
  base.lo_refined = fine.lo;
  base.hi_refined = fine.hi;
  return base;
}

}  // namespace

FitRange fit_asympt_psi(const SymbolTable& t, double r_lo, double r_hi) {
  if (r_hi <= 0.0) r_hi = t.u_max() * 0.5;
  return with_refinement(
      [&](int n) {
        FitRange out;
        for (double r : logspace(r_lo, r_hi,
                                 int(std::log10(r_hi / r_lo) * n))) {
          double cmp = std::pow(r, -t.profile().dim) * t.profile().eval(1.0 / r);
          out.absorb(t.psi(r) / cmp, {r});
        }
        return out;
      },
      32);
}

FitRange fit_h_H(const SymbolTable& t, double T) {
  return with_refinement(
      [&](int n) {
        FitRange out;
        for (double s : logspace(t.t_min(), T,
                                 int(std::log10(T / t.t_min()) * n)))
          out.absorb(t.h(s) / t.H(s), {s});
        return out;
      },
      32);
}

std::pair<FitRange, FitRange> fit_doubling_h(const SymbolTable& t, double T) {
  auto run = [&](int n) {
    std::pair<FitRange, FitRange> out;
    auto ts = logspace(t.t_min(), T, int(std::log10(T / t.t_min()) * n));
    std::vector<double> hs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) hs[i] = t.h(ts[i]);
    const double ia1 = 1.0 / t.profile().alpha1;
    const double ia2 = 1.0 / t.profile().alpha2;
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i; j < ts.size(); ++j) {
        double ratio = hs[j] / hs[i];
        double q = ts[j] / ts[i];
        out.first.absorb(ratio * std::pow(q, -ia2), {ts[i], ts[j]});
        out.second.absorb(ratio * std::pow(q, -ia1), {ts[i], ts[j]});
      }
    return out;
  };
  auto base = run(16);
  auto fine = run(32);
  base.first.lo_refined = fine.first.lo;
  base.first.hi_refined = fine.first.hi;
  base.second.lo_refined = fine.second.lo;
  base.second.hi_refined = fine.second.hi;
  return base;
}

FitRange fit_pineq(const SymbolTable& t) {
  const LevyProfile& p = t.profile();
  const int d = p.dim;
  auto compare = [&](double r) {
    // sigma_{d-1} [ r^2 int_0^{1/r} s^{d+1} f + int_{1/r}^inf s^{d-1} f ]
    auto small = [&](double x) {
      double s = std::exp(x);
      return p.eval(s) * std::pow(s, d + 2);
    };
    double head = integrate(small, std::log(1.0 / r) - 60.0, std::log(1.0 / r),
                            1e-9, 0.0);
    double tail = integrate_tail(
        [&](double s) { return p.eval(s) * std::pow(s, d - 1); }, 1.0 / r,
        1e-11);
    return sphere_area(d) * (r * r * head + tail);
  };
  return with_refinement(
      [&](int n) {
        FitRange out;
        double lo = t.u_min() * 1.01, hi = t.u_max() * 0.99;
        for (double r : logspace(lo, hi, int(std::log10(hi / lo) * n)))
          out.absorb(t.psi(r) / compare(r), {r});
        return out;
      },
      8);
}

FitRange fit_f_h(const SymbolTable& t) {
  double t_hi = std::min(t.t_max(), 1.0 / t.psi(0.5));
  return with_refinement(
      [&](int n) {
        FitRange out;
        for (double s : logspace(t.t_min(), t_hi * 0.999,
                                 std::max(8, int(std::log10(t_hi / t.t_min()) * n)))) {
          double hh = t.h(s);
          out.absorb(t.profile().eval(hh) * s * std::pow(hh, t.profile().dim),
                     {s});
        }
        return out;
      },
      32);
}

FitRange fit_h_integral(const SymbolTable& t, double a, double b, double T,
                        HScaleBound kind) {
  const double a1 = t.profile().alpha1, a2 = t.profile().alpha2;
  bool lower_kind = (kind == HScaleBound::IL1 || kind == HScaleBound::IL2);
  if (lower_kind && !(a - b / a1 + 1.0 > 0.0)) return {};
  if (!lower_kind && !(a - b / a2 + 1.0 < 0.0)) return {};

  auto integrand = [&](double s) { return std::pow(s, a) * std::pow(t.h(s), -b); };
  auto integral_below = [&](double r) {
    return integrate([&](double x) {
      double s = std::exp(x);
      return integrand(s) * s;
    }, std::log(r) - 40.0, std::log(r), 1e-8, 0.0);
  };
  auto integral_above = [&](double r) {
    if (r >= T) return 0.0;
    return integrate(integrand, r, T, 1e-8, 0.0);
  };

  return with_refinement(
      [&](int n) {
        FitRange out;
        double lo = t.t_min() * 10.0, hi = 0.999 * T;
        if (kind == HScaleBound::IL1 || kind == HScaleBound::IU1) {
          for (double r : logspace(lo, hi, int(std::log10(hi / lo) * n))) {
            double num = lower_kind ? integral_below(r) : integral_above(r);
            double den = std::pow(r, a + 1.0) * std::pow(t.h(r), -b);
            out.absorb(num / den, {r});
          }
        } else {
          double s_hi = 0.99 * t.h(T);
          double s_lo = std::max(1.05 / t.u_max(), 1e-3 * s_hi);
          for (double s : logspace(s_lo, s_hi,
                                   int(std::log10(s_hi / s_lo) * n))) {
            double psi_s = t.psi(1.0 / s);
            double r = 1.0 / psi_s;
            double num = lower_kind ? integral_below(r) : integral_above(r);
            double den = std::pow(psi_s, -a - 1.0) * std::pow(s, -b);
            out.absorb(num / den, {s});
          }
        }
        return out;
      },
      16);
}

}  // namespace levyheat
