#include "levyheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levyheat {

namespace {

constexpr double kPi = 3.14159265358979323846;

// smallest tabulated u with t * Phi >= 46 (multiplier below 1e-20)
double dual_cutoff(const SymbolTable& tab, double t) {
  double target = 46.0 / t;
  double u = tab.u_max();
  if (tab.phi(u) < 40.0 / t)
    throw numerical_error(
        "multiplier does not decay below noise at the table edge; widen the "
        "symbol table (u_max)");
  if (tab.phi(u) < target) return u;
  double lo = std::log(tab.u_min()), hi = std::log(u);
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (tab.phi(std::exp(mid)) < target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(hi);
}

// int_0^{u_cut} u^{d-1} W(u rho) e^{-t Phi(u)} du for an oscillating spherical
// factor W with zeros at zero(k)/rho; W is single-signed before its first zero
double radial_inversion(const SymbolTable& tab, double t, double rho,
                        const std::function<double(double)>& w,
                        const std::function<double(int)>& zero, int power,
                        double rel_tol) {
  const double u_cut = dual_cutoff(tab, t);
  auto env = [&](double u) {
    return std::pow(u, power) * std::exp(-t * tab.phi_extended(u));
  };
  auto f = [&](double u) { return env(u) * w(u * rho); };
  const double u1 = rho > 0 ? zero(1) / rho : kInf;

  // no oscillation inside the truncated range
  if (u1 >= u_cut) {
    return integrate([&](double x) {
      double u = std::exp(x);
      return f(u) * u;
    }, std::log(u_cut) - 50.0 / std::max(1, power),
       std::log(u_cut), rel_tol, 0.0);
  }

  double head = integrate([&](double x) {
    double u = std::exp(x);
    return f(u) * u;
  }, std::log(u1) - 50.0 / std::max(1, power), std::log(u1), rel_tol, 0.0);

  double direct = 0.0;
  std::vector<double> terms;
  terms.reserve(80);
  bool past_peak = (power == 0) || env(u1) >= env(u1 * 1.0001);
  bool slow_phase = false;
  bool exhausted = false;
  double scale = std::abs(head) + env(u1) / rho;
  double prev_mag = kInf;
  for (int k = 1; k < 1000000; ++k) {
    double a = zero(k) / rho;
    double b = zero(k + 1) / rho;
    if (a >= u_cut) {
      exhausted = true;
      break;
    }
    b = std::min(b, u_cut);
    double term = gl8(f, a, b);
    double mag = std::abs(term);
    if (!past_peak) {
      direct += term;
      if (env(b) < env(a)) past_peak = true;
      continue;
    }
    if (!slow_phase && mag > 0.6 * prev_mag) slow_phase = true;
    prev_mag = mag;
    if (!slow_phase) {
      direct += term;
      if (mag < 1e-18 * scale) {
        exhausted = true;
        break;
      }
      continue;
    }
    terms.push_back(term);
    if (mag < 1e-18 * scale) {
      exhausted = true;
      break;
    }
    if (terms.size() >= 64) break;
  }
  // a series that ran out on its own is summed plainly; only a genuinely
  // slowly decaying remainder goes through the averaging transform
  double tail;
  if (exhausted) {
    tail = 0.0;
    for (double t2 : terms) tail += t2;
  } else {
    tail = alternating_series_sum(terms);
  }
  return head + direct + tail;
}

}  // namespace

double free_density(const SymbolTable& tab, double t, double rho,
                    double rel_tol) {
  if (!(t > 0)) throw std::domain_error("free_density wants t > 0");
  const int d = tab.profile().dim;
  rho = std::abs(rho);
  double integral = radial_inversion(
      tab, t, rho, [&](double s) { return spherical_cos_average(d, s); },
      [&](int k) { return spherical_cos_average_zero(d, k); }, d - 1, rel_tol);
  return integral * sphere_area(d) / std::pow(2.0 * kPi, d);
}

double free_density_radial_derivative(const SymbolTable& tab, double t,
                                      double rho, double rel_tol) {
  if (!(t > 0)) throw std::domain_error("gradient wants t > 0");
  const int d = tab.profile().dim;
  if (rho == 0.0) return 0.0;
  double integral = radial_inversion(
      tab, t, rho,
      [&](double s) { return spherical_cos_average_derivative(d, s); },
      [&](int k) { return spherical_cos_average_derivative_zero(d, k); }, d,
      rel_tol);
  return integral * sphere_area(d) / std::pow(2.0 * kPi, d);
}

double free_gradient(const SymbolTable& tab, double t, const Point& x,
                     int axis, double rel_tol) {
  double rho = 0.0;
  for (int a = 0; a < tab.profile().dim; ++a) rho += x[a] * x[a];
  rho = std::sqrt(rho);
  if (rho == 0.0) return 0.0;
  return free_density_radial_derivative(tab, t, rho, rel_tol) * x[axis] / rho;
}

KernelGrid KernelGrid::build(std::shared_ptr<SpectralBox> box,
                             std::vector<double> times, bool with_gradients) {
  KernelGrid g;
  g.box = std::move(box);
  g.times = std::move(times);
  const std::size_t nt = g.times.size();
  g.slices.resize(nt);
  g.mass_defect.resize(nt);
  g.alias_bound.resize(nt);
  if (with_gradients) g.gradients.resize(nt);
  const double cell = g.box->spec().cell_volume();
  for (std::size_t i = 0; i < nt; ++i) {
    g.slices[i] = g.box->density_slice(g.times[i]);
    double mass = 0.0;
    for (double v : g.slices[i]) mass += v;
    g.mass_defect[i] = std::abs(1.0 - mass * cell);
    g.alias_bound[i] = g.box->alias_tail_estimate(g.times[i]);
    if (with_gradients) {
      g.gradients[i].resize(g.box->spec().dim);
      for (int a = 0; a < g.box->spec().dim; ++a)
        g.gradients[i][a] = g.box->gradient_slice(g.times[i], a);
    }
  }
  return g;
}

double KernelGrid::value(std::size_t ti, const Point& x) const {
  return box->point_value(slices[ti], x);
}

double wrap_floor(const LevyProfile& profile, const GridSpec& spec, double t,
                  double radius, double slice_peak) {
  const double X = spec.x_max;
  radius = std::min(std::abs(radius), 0.9 * X);
  double wrap = 0.0;
  for (int k = 1; k <= 3; ++k)
    wrap += profile.eval(2.0 * k * X - radius) + profile.eval(2.0 * k * X + radius);
  wrap *= t;
  return std::max(50.0 * wrap, 1e-14 * slice_peak);
}

double KernelGrid::noise_floor(std::size_t ti, double radius) const {
  double peak = *std::max_element(slices[ti].begin(), slices[ti].end());
  return wrap_floor(box->table().profile(), spec(), times[ti], radius, peak);
}

std::string KernelGrid::slice_csv(std::size_t ti) const {
  std::ostringstream os;
  os.precision(12);
  const int d = spec().dim;
  os << "t";
  for (int a = 0; a < d; ++a) os << ",x" << (a + 1);
  os << ",p";
  bool grads = !gradients.empty() && !gradients[ti].empty();
  if (grads)
    for (int a = 0; a < d; ++a) os << ",grad" << (a + 1);
  os << "\n";
  const int n = spec().n;
  const std::size_t total = spec().total();
  for (std::size_t idx = 0; idx < total; ++idx) {
    os << times[ti];
    std::size_t rem = idx;
    std::vector<int> coords(d);
    for (int a = d - 1; a >= 0; --a) {
      coords[a] = int(rem % n);
      rem /= n;
    }
    for (int a = 0; a < d; ++a) os << "," << box->coord(coords[a]);
    os << "," << slices[ti][idx];
    if (grads)
      for (int a = 0; a < d; ++a) os << "," << gradients[ti][a][idx];
    os << "\n";
  }
  return os.str();
}

double Envelope::operator()(double t, double radius) const {
  return envelope_Gn(*this, t, radius);
}

double envelope_Gn(const Envelope& env, double t, double radius) {
  const SymbolTable& tab = *env.table;
  const int d = tab.profile().dim;
  radius = std::abs(radius);
  double Hd = std::pow(tab.H(t), -d);
  double first = radius == 0.0
                     ? Hd
                     : std::min(Hd, t * tab.profile().eval(radius / 4.0));
  double second = Hd * std::pow(1.0 + radius / tab.H(t), -env.n);
  return first + second;
}

namespace {

// iterate over valid d-dimensional grid points; for d >= 2 a strided subset
template <typename F>
void for_valid_points(const KernelGrid& g, std::size_t ti, const F& body) {
  const GridSpec& s = g.spec();
  const int n = s.n;
  const std::size_t total = s.total();
  std::size_t stride = 1;
  if (s.dim >= 2 && total > 200000) stride = total / 200000;
  for (std::size_t idx = 0; idx < total; idx += stride) {
    std::size_t rem = idx;
    double rr = 0.0;
    Point x{};
    for (int a = s.dim - 1; a >= 0; --a) {
      int i = int(rem % n);
      rem /= n;
      x[a] = g.box->coord(i);
      rr += x[a] * x[a];
    }
    double radius = std::sqrt(rr);
    if (radius > 0.5 * s.x_max) continue;
    double p = g.slices[ti][idx];
    if (p <= g.noise_floor(ti, radius)) continue;
    body(x, radius, p, idx);
  }
}

}  // namespace

FitRange estimate_comparability(const KernelGrid& g, std::size_t ti) {
  const SymbolTable& tab = g.box->table();
  const double t = g.times[ti];
  const double hd = std::pow(tab.h(t), -tab.profile().dim);
  FitRange out;
  for_valid_points(g, ti, [&](const Point& x, double radius, double p,
                              std::size_t) {
    double cmp = radius == 0.0
                     ? hd
                     : std::min(hd, t * tab.profile().eval(radius));
    out.absorb(p / cmp, {radius});
  });
  return out;
}

FitRange fit_small_x_ratio(const KernelGrid& g, std::size_t ti) {
  const SymbolTable& tab = g.box->table();
  const double t = g.times[ti];
  const double h = tab.h(t);
  const double hd = std::pow(h, -tab.profile().dim);
  FitRange out;
  for_valid_points(g, ti,
                   [&](const Point&, double radius, double p, std::size_t) {
                     if (radius <= h) out.absorb(p / hd, {radius});
                   });
  return out;
}

FitRange fit_large_x_ratio(const KernelGrid& g, std::size_t ti) {
  const SymbolTable& tab = g.box->table();
  const double t = g.times[ti];
  const double h = tab.h(t);
  FitRange out;
  for_valid_points(g, ti,
                   [&](const Point&, double radius, double p, std::size_t) {
                     if (radius >= h)
                       out.absorb(p / (t * tab.profile().eval(radius)),
                                  {radius});
                   });
  return out;
}

FitRange fit_translation(const KernelGrid& g, std::size_t ti) {
  if (g.spec().dim != 1)
    throw config_error("translation fit implemented for d = 1");
  const SymbolTable& tab = g.box->table();
  const double t = g.times[ti];
  const double h = tab.h(t);
  const double dx = g.spec().dx();
  const auto& s = g.slices[ti];
  FitRange out;
  std::vector<int> shifts;
  for (double frac : {0.5, 0.25, 0.125, -0.5, -0.25}) {
    int k = int(std::lround(frac * h / (2.0 * dx) * 2.0));
    if (k != 0 && std::abs(k) * dx <= 0.5 * h) shifts.push_back(k);
  }
  for_valid_points(g, ti, [&](const Point& x, double radius, double p,
                              std::size_t idx) {
    (void)radius;
    for (int k : shifts) {
      std::size_t j = idx + k;
      if (j >= s.size()) continue;
      double shifted_radius = std::abs(x[0] + k * dx);
      if (s[j] <= g.noise_floor(ti, shifted_radius)) continue;
      out.absorb(s[j] / p, {x[0], k * dx});
    }
  });
  return out;
}

FitRange fit_3g(const KernelGrid& g, std::size_t it, std::size_t is,
                std::size_t its, double R) {
  if (g.spec().dim != 1) throw config_error("3G fit implemented for d = 1");
  FitRange out;
  auto xs = linspace(-R, R, 33);
  for (double x : xs)
    for (double y : xs) {
      double pt = g.value(it, {x});
      double ps = g.value(is, {y});
      double pts = g.value(its, {x + y});
      if (pts <= g.noise_floor(its, std::abs(x + y))) continue;
      out.absorb(std::min(pt, ps) / pts, {x, y});
    }
  return out;
}

FitRange fit_4g(const KernelGrid& g, std::size_t it, std::size_t is,
                std::size_t its, double a, double b, double R) {
  if (g.spec().dim != 1) throw config_error("4G fit implemented for d = 1");
  const int d = 1;
  auto ga = [&](std::size_t ti, double scalefac, double x) {
    return std::pow(scalefac, d) * g.value(ti, {scalefac * x});
  };
  FitRange out;
  R = std::min(R, 0.8 * g.spec().x_max / b);
  auto xs = linspace(-R, R, 33);
  for (double x : xs)
    for (double y : xs) {
      double gb_t = ga(it, b, x);
      double ga_s = ga(is, a, y);
      double gba_t = ga(it, b - a, x);
      double ga_ts = ga(its, a, x + y);
      double den = std::max(gba_t, ga_s) * ga_ts;
      if (den <= 0 || ga_ts <= g.noise_floor(its, std::abs(a * (x + y))))
        continue;
      out.absorb(gb_t * ga_s / den, {x, y});
    }
  return out;
}

FitRange fit_difference(const KernelGrid& g, std::size_t ti, double n_order) {
  if (g.spec().dim != 1)
    throw config_error("difference fit implemented for d = 1");
  const SymbolTable& tab = g.box->table();
  Envelope env{n_order, g.box->table_ptr()};
  const double t = g.times[ti];
  const double h = tab.h(t);
  const double dx = g.spec().dx();
  FitRange out;
  auto deltas = logspace(dx, 4.0 * h, 24);
  const auto& s = g.slices[ti];
  for_valid_points(g, ti, [&](const Point& x, double, double p,
                              std::size_t idx) {
    (void)p;
    for (double del : deltas) {
      int k = std::max(1, int(std::lround(del / dx)));
      std::size_t j = idx + k;
      if (j >= s.size()) continue;
      double y = x[0] + k * dx;
      if (std::abs(y) > 0.8 * g.spec().x_max) continue;
      double num = std::abs(s[j] - s[idx]);
      double den = std::min(k * dx / h, 1.0) *
                   (env(t, std::abs(x[0])) + env(t, std::abs(y)));
      if (den <= 0) continue;
      out.absorb(num / den, {x[0], k * dx});
    }
  });
  return out;
}

FitRange fit_gradient_envelope(const KernelGrid& g, std::size_t ti,
                               double n_order) {
  if (g.gradients.empty() || g.gradients[ti].empty())
    throw config_error("gradient slices not built");
  const SymbolTable& tab = g.box->table();
  Envelope env{n_order, g.box->table_ptr()};
  const double t = g.times[ti];
  const double hinv = 1.0 / tab.h(t);
  const auto& grad = g.gradients[ti][0];
  FitRange out;
  for_valid_points(g, ti, [&](const Point& x, double radius, double,
                              std::size_t idx) {
    (void)x;
    double den = hinv * env(t, 2.0 * radius);
    out.absorb(std::abs(grad[idx]) / den, {radius});
  });
  return out;
}

double ck_residual_free(const KernelGrid& g, std::size_t is, std::size_t it,
                        std::size_t its, const std::vector<double>& probe_sep) {
  if (g.spec().dim != 1) throw config_error("CK residual implemented for d=1");
  const int n = g.spec().n;
  const double dx = g.spec().dx();
  const auto& a = g.slices[is];
  const auto& b = g.slices[it];
  const auto& c = g.slices[its];
  double worst = 0.0;
  for (double sep : probe_sep) {
    int ksep = int(std::lround(sep / dx));
    int ix = n / 2 + ksep / 2;          // x at +sep/2
    int iy = n / 2 - (ksep - ksep / 2); // y at -sep/2 (grid-aligned)
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      int ia = ix - j + n / 2;  // index of coordinate x - z_j
      int ib = j - iy + n / 2;  // index of coordinate z_j - y
      if (ia < 0 || ia >= n || ib < 0 || ib >= n) continue;
      acc += a[ia] * b[ib];
    }
    acc *= dx;
    int ixy = ix - iy + n / 2;
    double ref = c[ixy];
    if (ref <= g.noise_floor(its, std::abs((ix - iy) * dx))) continue;
    worst = std::max(worst, std::abs(acc - ref) / ref);
  }
  return worst;
}

double gradient_fd_deviation(const SymbolTable& tab, double t,
                             const std::vector<double>& radii, double step) {
  double worst = 0.0;
  for (double r : radii) {
    double an = free_density_radial_derivative(tab, t, r);
    if (std::abs(an) <= 1e-12) continue;
    double fd = (free_density(tab, t, r + step) -
                 free_density(tab, t, std::abs(r - step))) /
                (2.0 * step);
    worst = std::max(worst, std::abs(an - fd) / std::abs(an));
  }
  return worst;
}

}  // namespace levyheat
