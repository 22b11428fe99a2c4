#include "levyheat/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace levyheat {

namespace {

// Kronrod-15 abscissae/weights and the embedded Gauss-7 weights.
const double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
const double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
const double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i)
    resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  return {resk * h, std::abs(resk - resg) * h};
}

double integrate_rec(const Fn1& f, double a, double b, double tol,
                     double scale, int depth, int max_depth) {
  GkResult r = gk15(f, a, b);
  if (r.error <= tol || r.error <= 5e-16 * scale ||
      (b - a) <= 1e-14 * (std::abs(a) + std::abs(b)))
    return r.value;
  if (depth >= max_depth)
    throw numerical_error("quadrature did not converge on [" +
                          std::to_string(a) + ", " + std::to_string(b) +
                          "], residual " + std::to_string(r.error));
  const double c = 0.5 * (a + b);
  return integrate_rec(f, a, c, 0.5 * tol, scale, depth + 1, max_depth) +
         integrate_rec(f, c, b, 0.5 * tol, scale, depth + 1, max_depth);
}

const double kXgl8[4] = {0.183434642495650, 0.525532409916329,
                         0.796666477413627, 0.960289856497536};
const double kWgl8[4] = {0.362683783378362, 0.313706645877887,
                         0.222381034453374, 0.101228536290376};

}  // namespace

double integrate(const Fn1& f, double a, double b, double rel_tol,
                 double abs_tol, int max_depth) {
  if (!(b > a)) return 0.0;
  GkResult probe = gk15(f, a, b);
  double scale = std::max(std::abs(probe.value), abs_tol);
  double tol = std::max(abs_tol, rel_tol * std::abs(probe.value));
  if (tol <= 0) tol = 1e-300;
  if (probe.error <= tol) return probe.value;
  const double c = 0.5 * (a + b);
  return integrate_rec(f, a, c, 0.5 * tol, scale, 1, max_depth) +
         integrate_rec(f, c, b, 0.5 * tol, scale, 1, max_depth);
}

double gl8(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    s += kWgl8[i] * (f(c - h * kXgl8[i]) + f(c + h * kXgl8[i]));
  return s * h;
}

double integrate_tail(const Fn1& f, double a, double rel_tol) {
  double total = 0.0;
  double lo = a;
  double prev = -1.0;
  double ratio_prev = -1.0;
  for (int k = 0; k < 400; ++k) {
    double hi = 2.0 * lo;
    double inc = integrate(f, lo, hi, 1e-9, rel_tol * std::abs(total) * 0.01);
    total += inc;
    if (total > 0 && inc <= rel_tol * total) return total;
    if (prev > 0 && inc > 0) {
      double ratio = inc / prev;
      if (ratio < 0.9 && ratio_prev > 0 &&
          std::abs(ratio - ratio_prev) < 0.02 * (1.0 - ratio)) {
        // geometric remainder
        return total + inc * ratio / (1.0 - ratio);
      }
      ratio_prev = ratio;
    }
    prev = inc;
    lo = hi;
  }
  throw numerical_error("tail integral from " + std::to_string(a) +
                        " did not stabilize");
}

double alternating_series_sum(const std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> s(terms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc += terms[i];
    s[i] = acc;
  }
  // repeated averaging (Euler transform of the partial sums)
  for (std::size_t len = s.size(); len > 1; --len)
    for (std::size_t k = 0; k + 1 < len; ++k) s[k] = 0.5 * (s[k] + s[k + 1]);
  return s[0];
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < n; ++i)
    v[i] = std::exp(l0 + (l1 - l0) * i / double(n - 1));
  return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / double(n - 1);
  return v;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinFit fit;
  const double den = n * sxx - sx * sx;
  if (std::abs(den) > 1e-300) {
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  return fit;
}

void FitRange::absorb(double value, std::initializer_list<double> where) {
  if (!std::isfinite(value)) {
    hi = kInf;
    return;
  }
  if (value < lo) {
    lo = value;
    arg_lo.assign(where);
  }
  if (value > hi) {
    hi = value;
    arg_hi.assign(where);
  }
}

bool FitRange::finite() const {
  return std::isfinite(lo) && std::isfinite(hi) && hi > -kInf && lo < kInf;
}

bool FitRange::stable(double rel) const {
  if (!finite() || !std::isfinite(lo_refined) || !std::isfinite(hi_refined))
    return false;
  auto close = [rel](double a, double b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 || std::abs(a - b) <= rel * scale;
  };
  return close(hi, hi_refined) && close(lo, lo_refined);
}

EnvelopeFit fit_affine_envelope(const std::vector<double>& t,
                                const std::vector<double>& kappa) {
  const std::size_t n = std::min(t.size(), kappa.size());
  if (n == 0) return {};
  auto feasible = [&](double eta, double beta) {
    if (eta < -1e-12 || beta < -1e-12) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (eta + beta * t[i] < kappa[i] - 1e-12 * std::max(1.0, kappa[i]))
        return false;
    return true;
  };
  auto objective = [&](double eta, double beta) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = eta + beta * t[i] - kappa[i];
      s += d * d;
    }
    return s;
  };
  double best_eta = 0, best_beta = 0, best_obj = kInf;
  auto consider = [&](double eta, double beta) {
    eta = std::max(eta, 0.0);
    beta = std::max(beta, 0.0);
    if (!feasible(eta, beta)) return;
    double obj = objective(eta, beta);
    if (obj < best_obj) {
      best_obj = obj;
      best_eta = eta;
      best_beta = beta;
    }
  };
  double kmax = 0, slope_max = 0;
  for (std::size_t i = 0; i < n; ++i) {
    kmax = std::max(kmax, kappa[i]);
    if (t[i] > 0) slope_max = std::max(slope_max, kappa[i] / t[i]);
  }
  consider(kmax, 0.0);
  consider(0.0, slope_max);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(t[j] - t[i]) < 1e-14) continue;
      double beta = (kappa[j] - kappa[i]) / (t[j] - t[i]);
      double eta = kappa[i] - beta * t[i];
      consider(eta, beta);
    }
  return {best_eta, best_beta};
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  d_.assign(n, 0.0);
  if (n < 2) return;
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      double w0 = 2 * h1 + h0, w1 = h1 + 2 * h0;
      d_[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
    }
  }
}

double Pchip::operator()(double x) const {
  if (x_.empty()) return kNaN;
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = (it - x_.begin()) - 1;
  double h = x_[i + 1] - x_[i];
  double s = (x - x_[i]) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double lagrange4(const std::vector<double>& xs, const std::vector<double>& ys,
                 double x) {
  const std::size_t n = xs.size();
  if (n == 0) return kNaN;
  if (n == 1) return ys[0];
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  std::size_t i = it - xs.begin();
  std::size_t lo = (i >= 2) ? i - 2 : 0;
  if (lo + 4 > n) lo = n >= 4 ? n - 4 : 0;
  std::size_t m = std::min<std::size_t>(4, n - lo);
  double acc = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double term = ys[lo + a];
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      term *= (x - xs[lo + b]) / (xs[lo + a] - xs[lo + b]);
    }
    acc += term;
  }
  return acc;
}

std::vector<NodeWeight> graded_midpoint_nodes(double a, double b, int levels,
                                              int per_panel, bool grade_a,
                                              bool grade_b) {
  std::vector<NodeWeight> out;
  if (!(b > a)) return out;
  auto panel = [&](double lo, double hi) {
    double w = (hi - lo) / per_panel;
    for (int i = 0; i < per_panel; ++i)
      out.push_back({lo + (i + 0.5) * w, w});
  };
  auto graded_half = [&](double lo, double hi, bool into_lo) {
    // panels shrink geometrically toward the graded end; the residual sliver
    // is one midpoint panel (the integrand is assumed bounded there)
    double len = hi - lo;
    if (into_lo) {
      double edge = hi;
      for (int k = 1; k <= levels; ++k) {
        double next = lo + len * std::pow(0.5, k);
        panel(next, edge);
        edge = next;
      }
      panel(lo, edge);
    } else {
      double edge = lo;
      for (int k = 1; k <= levels; ++k) {
        double next = hi - len * std::pow(0.5, k);
        panel(edge, next);
        edge = next;
      }
      panel(edge, hi);
    }
  };
  double mid = 0.5 * (a + b);
  if (grade_a && grade_b) {
    graded_half(a, mid, true);
    graded_half(mid, b, false);
  } else if (grade_a) {
    graded_half(a, mid, true);
    panel(mid, b);
    // split the plain half once more for balance
  } else if (grade_b) {
    panel(a, mid);
    graded_half(mid, b, false);
  } else {
    panel(a, mid);
    panel(mid, b);
  }
  return out;
}

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

int thread_count() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  int nt = std::min<std::size_t>(thread_count(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace levyheat
