#include "levyheat/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace levyheat {

namespace {

std::vector<double> stored_grid(double T, const DuhamelOptions& o) {
  std::set<double> s;
  for (int k = 1; k <= o.stored_geom_levels; ++k)
    s.insert(T * std::pow(0.5, k));
  for (int j = 1; j <= o.stored_uniform; ++j)
    s.insert(T * double(j) / o.stored_uniform);
  for (int k = 2; k <= o.stored_geom_levels; ++k)
    s.insert(T * (1.0 - std::pow(0.5, k)));
  return {s.begin(), s.end()};
}

// out = 4-point Lagrange combination of stored slices at time w; slices are
// zero at t = 0 for n >= 1 tracks, represented by a virtual node
void interp_slices(const std::vector<double>& times,
                   const std::vector<std::vector<double>>& slices, double w,
                   bool zero_at_origin, std::vector<double>& out) {
  const std::size_t n = times.size();
  const std::size_t total = slices.front().size();
  out.assign(total, 0.0);
  // collect up to 4 interpolation nodes around w
  std::vector<double> ts;
  std::vector<const std::vector<double>*> vs;
  auto it = std::lower_bound(times.begin(), times.end(), w);
  long i = it - times.begin();
  long lo = i - 2;
  if (zero_at_origin) {
    if (lo < -1) lo = -1;
  } else if (lo < 0) {
    lo = 0;
  }
  if (lo + 4 > long(n)) lo = long(n) - 4;
  if (!zero_at_origin && lo < 0) lo = 0;
  for (long k = lo; k < lo + 4 && k < long(n); ++k) {
    if (k < 0) {
      ts.push_back(0.0);
      vs.push_back(nullptr);
    } else {
      ts.push_back(times[k]);
      vs.push_back(&slices[k]);
    }
  }
  for (std::size_t a2 = 0; a2 < ts.size(); ++a2) {
    double c = 1.0;
    for (std::size_t b = 0; b < ts.size(); ++b) {
      if (a2 == b) continue;
      c *= (w - ts[b]) / (ts[a2] - ts[b]);
    }
    if (!vs[a2]) continue;  // virtual zero slice
    const std::vector<double>& src = *vs[a2];
    for (std::size_t j = 0; j < total; ++j) out[j] += c * src[j];
  }
}

// sum_{k<=n} C(n,k) (beta T)^k / k! * eta^{n-k}, the per-term envelope
double term_bound(double eta, double betaT, int n) {
  double total = 0.0;
  double binom = 1.0;           // C(n, k)
  double pow_bt = 1.0;          // (beta T)^k / k!
  double pow_eta = std::pow(eta, n);
  for (int k = 0; k <= n; ++k) {
    total += binom * pow_bt * pow_eta;
    binom *= double(n - k) / double(k + 1);
    pow_bt *= betaT / double(k + 1);
    if (eta > 0.0)
      pow_eta /= eta;
    else
      pow_eta = (k + 1 == n) ? 1.0 : 0.0;
  }
  return total;
}

double tail_bound(double eta, double betaT, int after) {
  if (eta >= 1.0) return kInf;
  double total = 0.0;
  for (int n = after + 1; n <= after + 400; ++n) {
    double b = term_bound(eta, betaT, n);
    total += b;
    if (b < 1e-4 * total || b < 1e-18) break;
  }
  return total;
}

// every (eta_i, h_i) pair read off the kappa curve is admissible in the
// per-term envelope; the minimum over pairs is the sharpest bound it gives
struct TailPairs {
  std::vector<std::pair<double, double>> pairs;  // (eta, beta = eta/h)
  double best(double T, int after) const {
    double out = kInf;
    for (const auto& [eta, beta] : pairs)
      out = std::min(out, tail_bound(eta, beta * T, after));
    return out;
  }
};

TailPairs tail_pairs_from_curve(const KappaCurve& curve, double fallback_eta,
                                double fallback_beta) {
  TailPairs tp;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    double eta = curve.values[i];
    double t = curve.times[i];
    if (eta > 0.0 && eta < 1.0 && t > 0.0) tp.pairs.push_back({eta, eta / t});
  }
  if (fallback_eta > 0.0 && fallback_eta < 1.0)
    tp.pairs.push_back({fallback_eta, fallback_beta});
  if (tp.pairs.empty()) tp.pairs.push_back({0.5, fallback_beta});
  return tp;
}

struct Track {
  std::vector<double> times;
  std::vector<std::vector<double>> sum;
  std::vector<double> term_sup;
  double tail = 0.0;
  int terms = 0;
};

// one Duhamel series over horizon T; terminal data is either a probe delta
// (probe != nullptr; the n = 0 term uses exact spectral slices) or a general
// grid function
Track build_track(const SpectralBox& box, const std::vector<double>& q_grid,
                  double T, const DuhamelOptions& o, const TailPairs& tails,
                  const double* probe, const std::vector<double>* init) {
  Track tr;
  tr.times = stored_grid(T, o);
  const std::size_t nt = tr.times.size();
  const std::size_t total = box.spec().total();

  std::vector<std::vector<double>> prev(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    if (probe) {
      prev[i] = box.density_slice(tr.times[i], Point{*probe});
    } else {
      prev[i] = *init;
      box.semigroup_apply(tr.times[i], prev[i]);
    }
  }
  tr.sum = prev;
  // reference scale at the horizon for relative term norms
  std::vector<double> ref = tr.sum.back();
  double ref_peak = 0.0;
  for (double v : ref) ref_peak = std::max(ref_peak, std::abs(v));
  tr.term_sup.push_back(1.0);

  std::vector<double> buf, term_slice, point_buf;
  for (int n = 1; n <= o.max_terms; ++n) {
    std::vector<std::vector<double>> cur(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      const double v = tr.times[i];
      cur[i].assign(total, 0.0);
      auto nodes =
          graded_midpoint_nodes(0.0, v, o.quad_levels, o.quad_midpoints,
                                true, true);
      for (const auto& nw : nodes) {
        double w = v - nw.x;
        if (n == 1 && probe) {
          buf = box.density_slice(w, Point{*probe});
        } else {
          interp_slices(tr.times, prev, w, n >= 2, buf);
        }
        for (std::size_t j = 0; j < total; ++j) buf[j] *= q_grid[j];
        box.semigroup_apply(nw.x, buf);
        for (std::size_t j = 0; j < total; ++j)
          cur[i][j] += nw.w * buf[j];
      }
    }
    double sup = 0.0;
    const auto& horizon_term = cur.back();
    for (std::size_t j = 0; j < total; ++j) {
      double den = std::max(std::abs(ref[j]), 1e-9 * ref_peak);
      sup = std::max(sup, std::abs(horizon_term[j]) / den);
    }
    tr.term_sup.push_back(sup);
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < total; ++j) tr.sum[i][j] += cur[i][j];
    prev.swap(cur);
    tr.terms = n;
    if (sup < 1e-30) {  // identically zero term: the series has terminated
      tr.tail = 0.0;
      break;
    }
    tr.tail = tails.best(T, n);
    if (n >= 2 && tr.tail < o.series_tol) break;
  }
  return tr;
}

std::vector<double> probe_template(const SpectralBox& box, double h,
                                   const DuhamelOptions& o) {
  std::vector<double> probes{box.snap(0.0)};
  for (double f : o.probe_fractions) {
    for (double s : {1.0, -1.0}) {
      double y = box.snap(s * f * h);
      if (std::abs(y) < 0.45 * box.spec().x_max) probes.push_back(y);
    }
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  // origin first, then by distance
  std::stable_sort(probes.begin(), probes.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  return probes;
}

// sup over valid grid points of num/den for slices centered at y
double masked_ratio_sup(const SpectralBox& box, double t,
                        const std::vector<double>& num,
                        const std::vector<double>& den, double y) {
  const GridSpec& s = box.spec();
  double peak = 0.0;
  for (double v : den) peak = std::max(peak, v);
  double best = 0.0;
  for (int j = 0; j < s.n; ++j) {
    double x = box.coord(j);
    double r = std::abs(x - y);
    if (r > 0.45 * s.x_max || std::abs(x) > 0.45 * s.x_max) continue;
    double floor = wrap_floor(box.table().profile(), s, t, r, peak);
    if (den[j] <= floor) continue;
    best = std::max(best, num[j] / den[j]);
  }
  return best;
}

}  // namespace

nlohmann::json KappaCurve::to_json() const {
  nlohmann::json j;
  j["times"] = times;
  j["values"] = values;
  j["eta"] = eta;
  j["beta"] = beta;
  j["h_eta"] = h_eta;
  return j;
}

nlohmann::json SeriesDiagnostics::to_json() const {
  nlohmann::json j;
  j["terms_used"] = terms_used;
  j["eta_build"] = eta_build;
  j["beta"] = beta;
  j["h_eta"] = h_eta;
  j["term_norms"] = term_norms;
  j["tail_bound"] = tail_bound;
  j["ck_splits"] = ck_splits;
  j["build_horizon"] = build_horizon;
  return j;
}

KappaCurve relative_kato_estimate(const SpectralBox& box, const Potential& q,
                                  const std::vector<double>& horizons,
                                  const DuhamelOptions& opts) {
  if (box.spec().dim != 1)
    throw config_error("perturbation pipeline is d = 1");
  std::vector<double> q_abs = sample_potential(q, box);
  for (double& v : q_abs) v = std::abs(v);
  KappaCurve curve;
  const std::size_t total = box.spec().total();
  for (double t : horizons) {
    auto probes = probe_template(box, box.table().h(t), opts);
    double kap = 0.0;
    std::vector<double> p1(total), buf;
    for (double y : probes) {
      std::fill(p1.begin(), p1.end(), 0.0);
      auto nodes = graded_midpoint_nodes(0.0, t, opts.quad_levels,
                                         opts.quad_midpoints, true, true);
      for (const auto& nw : nodes) {
        buf = box.density_slice(t - nw.x, Point{y});
        for (std::size_t j = 0; j < total; ++j) buf[j] *= q_abs[j];
        box.semigroup_apply(nw.x, buf);
        for (std::size_t j = 0; j < total; ++j) p1[j] += nw.w * buf[j];
      }
      auto free = box.density_slice(t, Point{y});
      kap = std::max(kap, masked_ratio_sup(box, t, p1, free, y));
    }
    curve.times.push_back(t);
    curve.values.push_back(kap);
  }
  auto fit = fit_affine_envelope(curve.times, curve.values);
  curve.eta = fit.eta;
  curve.beta = fit.beta;
  curve.h_eta = 0.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    if (curve.values[i] <= curve.eta + 1e-12)
      curve.h_eta = std::max(curve.h_eta, curve.times[i]);
  return curve;
}

PerturbedKernel PerturbedKernel::build(std::shared_ptr<SpectralBox> box,
                                       Potential q, double horizon,
                                       DuhamelOptions opts) {
  if (box->spec().dim != 1)
    throw config_error("perturbation pipeline is d = 1");
  PerturbedKernel pk;
  pk.box_ = box;
  pk.q_ = q;
  pk.opts_ = opts;
  pk.horizon_ = horizon;
  pk.q_grid_ = sample_potential(q, *box);

  // kappa curve: the requested horizon and its halvings
  std::vector<double> hs;
  for (int k = 0; k < 10; ++k) hs.push_back(horizon * std::pow(0.5, k));
  std::reverse(hs.begin(), hs.end());
  pk.kappa_ = relative_kato_estimate(*box, q, hs, opts);

  // sub-horizon with a comfortable relative-Kato reading
  int splits = 0;
  double S = horizon;
  auto kappa_at = [&](double t) {
    for (std::size_t i = 0; i < pk.kappa_.times.size(); ++i)
      if (std::abs(pk.kappa_.times[i] - t) < 1e-12 * t)
        return pk.kappa_.values[i];
    return relative_kato_estimate(*box, q, {t}, opts).values[0];
  };
  while (kappa_at(S) >= opts.eta_split && splits < 8) {
    S *= 0.5;
    ++splits;
  }
  if (kappa_at(S) >= 1.0)
    throw numerical_error(
        "horizon too large: relative-Kato reading stays >= 1; subdivide time");
  const int m = 1 << splits;
  double eta_b = kappa_at(S);
  TailPairs tails = tail_pairs_from_curve(pk.kappa_, eta_b, eta_b / S);

  pk.probes_ = probe_template(*box, box->table().h(horizon), opts);
  pk.diag_.ck_splits = m - 1;
  pk.diag_.build_horizon = S;
  pk.diag_.eta_build = eta_b;
  pk.diag_.beta = pk.kappa_.beta;
  pk.diag_.h_eta = pk.kappa_.h_eta > 0 ? pk.kappa_.h_eta : S;

  pk.tilde_.resize(pk.probes_.size());
  std::vector<std::vector<double>> all_times(pk.probes_.size());
  std::vector<SeriesDiagnostics> per_probe(pk.probes_.size());
  parallel_for(pk.probes_.size(), [&](std::size_t pi) {
    Track tr = build_track(*box, pk.q_grid_, S, opts, tails,
                           &pk.probes_[pi], nullptr);
    per_probe[pi].terms_used = tr.terms;
    per_probe[pi].term_norms = tr.term_sup;
    per_probe[pi].tail_bound = tr.tail;
    std::vector<double> times_abs = tr.times;
    auto slices = std::move(tr.sum);
    double base = 0.0;
    for (int part = 1; part < m; ++part) {
      base += S;
      Track next = build_track(*box, pk.q_grid_, S, opts, tails, nullptr,
                               &slices.back());
      for (std::size_t i = 0; i < next.times.size(); ++i) {
        times_abs.push_back(base + next.times[i]);
        slices.push_back(std::move(next.sum[i]));
      }
    }
    all_times[pi] = std::move(times_abs);
    pk.tilde_[pi] = std::move(slices);
  });
  pk.times_ = all_times.front();
  pk.diag_.terms_used = per_probe.front().terms_used;
  pk.diag_.term_norms = per_probe.front().term_norms;
  pk.diag_.tail_bound = per_probe.front().tail_bound;
  return pk;
}

std::vector<double> PerturbedKernel::tilde_slice(std::size_t probe,
                                                 double t) const {
  if (probe >= probes_.size()) throw std::out_of_range("probe index");
  if (t < times_.front() * (1.0 - 1e-12) || t > times_.back() * (1.0 + 1e-12))
    throw std::out_of_range("time outside the stored range");
  std::vector<double> out;
  interp_slices(times_, tilde_[probe], t, false, out);
  return out;
}

std::vector<double> PerturbedKernel::free_slice(std::size_t probe,
                                                double t) const {
  return box_->density_slice(t, Point{probes_[probe]});
}

std::vector<double> semigroup_action(const SpectralBox& box,
                                     const Potential& q,
                                     const std::vector<double>& phi, double t,
                                     const DuhamelOptions& opts) {
  auto q_grid = sample_potential(q, box);
  double kap = relative_kato_estimate(box, q, {t}, opts).values[0];
  int splits = 0;
  double S = t;
  while (kap >= opts.eta_split && splits < 8) {
    S *= 0.5;
    ++splits;
    kap = relative_kato_estimate(box, q, {S}, opts).values[0];
  }
  if (kap >= 1.0)
    throw numerical_error("horizon too large for semigroup application");
  TailPairs tails;
  tails.pairs.push_back({std::max(kap, 1e-9), std::max(kap, 1e-9) / S});
  std::vector<double> state = phi;
  for (int part = 0; part < (1 << splits); ++part) {
    Track tr = build_track(box, q_grid, S, opts, tails, nullptr, &state);
    state = std::move(tr.sum.back());
  }
  return state;
}

std::vector<double> PerturbedKernel::apply_semigroup(
    const std::vector<double>& phi, double t) const {
  return semigroup_action(*box_, q_, phi, t, opts_);
}

FitRange PerturbedKernel::ratio_range(double t) const {
  FitRange out;
  const GridSpec& s = box_->spec();
  for (std::size_t pi = 0; pi < probes_.size(); ++pi) {
    auto tilde = tilde_slice(pi, t);
    auto free = free_slice(pi, t);
    double peak = 0.0;
    for (double v : free) peak = std::max(peak, v);
    for (int j = 0; j < s.n; ++j) {
      double x = box_->coord(j);
      double r = std::abs(x - probes_[pi]);
      if (r > 0.45 * s.x_max || std::abs(x) > 0.45 * s.x_max) continue;
      double floor = wrap_floor(box_->table().profile(), s, t, r, peak);
      if (free[j] <= floor) continue;
      out.absorb(tilde[j] / free[j], {probes_[pi], x});
    }
  }
  return out;
}

double PerturbedKernel::symmetry_residual(double t) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    auto si = tilde_slice(i, t);
    for (std::size_t j = i + 1; j < probes_.size(); ++j) {
      auto sj = tilde_slice(j, t);
      double a = box_->point_value(si, Point{probes_[j]});
      double b = box_->point_value(sj, Point{probes_[i]});
      double den = std::max(std::abs(a), std::abs(b));
      if (den < 1e-300) continue;
      worst = std::max(worst, std::abs(a - b) / den);
    }
  }
  return worst;
}

double PerturbedKernel::ck_residual(double s, double t) const {
  if (s + t > times_.back() * (1.0 + 1e-12))
    throw config_error("CK check needs horizon >= s + t");
  const GridSpec& sp = box_->spec();
  const double dx = sp.dx();
  double worst = 0.0;
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    auto a = tilde_slice(i, s);
    for (std::size_t j = 0; j < probes_.size(); ++j) {
      auto b = tilde_slice(j, t);
      double acc = 0.0;
      for (int k = 0; k < sp.n; ++k) {
        if (std::abs(box_->coord(k)) > 0.9 * sp.x_max) continue;
        acc += a[k] * b[k];
      }
      acc *= dx;
      auto c = tilde_slice(j, s + t);
      double ref = box_->point_value(c, Point{probes_[i]});
      if (ref <= 0) continue;
      double peak = *std::max_element(c.begin(), c.end());
      double floor = wrap_floor(box_->table().profile(), sp, s + t,
                                std::abs(probes_[i] - probes_[j]), peak);
      if (ref <= 50.0 * floor) continue;
      worst = std::max(worst, std::abs(acc - ref) / ref);
    }
  }
  return worst;
}

double PerturbedKernel::fixed_point_residual() const {
  // apply the Duhamel map once more to the stored solution at the horizon
  const double T = times_.back();
  const std::size_t total = box_->spec().total();
  double worst = 0.0;
  for (std::size_t pi = 0; pi < std::min<std::size_t>(probes_.size(), 3);
       ++pi) {
    std::vector<double> mapped = box_->density_slice(T, Point{probes_[pi]});
    auto free = mapped;
    auto nodes = graded_midpoint_nodes(0.0, T, opts_.quad_levels,
                                       opts_.quad_midpoints, true, true);
    std::vector<double> buf;
    for (const auto& nw : nodes) {
      interp_slices(times_, tilde_[pi], T - nw.x, false, buf);
      for (std::size_t j = 0; j < total; ++j) buf[j] *= q_grid_[j];
      box_->semigroup_apply(nw.x, buf);
      for (std::size_t j = 0; j < total; ++j) mapped[j] += nw.w * buf[j];
    }
    const auto& cur = tilde_[pi].back();
    double peak = 0.0;
    for (double v : free) peak = std::max(peak, v);
    for (std::size_t j = 0; j < total; ++j) {
      double den = std::max(std::abs(free[j]), 1e-6 * peak);
      worst = std::max(worst, std::abs(mapped[j] - cur[j]) / den);
    }
  }
  return worst;
}

double SpaceTimeBump::space(double x) const {
  double s = (x - x_center) / x_width;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double SpaceTimeBump::time(double t) const {
  double s = (t - t_center) / t_width;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double SpaceTimeBump::time_dt(double t) const {
  double s = (t - t_center) / t_width;
  if (std::abs(s) >= 1.0) return 0.0;
  double g = 1.0 - s * s;
  return std::exp(1.0 - 1.0 / g) * (-2.0 * s / (g * g)) / t_width;
}

double SpaceTimeBump::value(double t, double x) const {
  return amplitude * time(t) * space(x);
}

double SpaceTimeBump::dt(double t, double x) const {
  return amplitude * time_dt(t) * space(x);
}

double weak_solution_residual(const PerturbedKernel& pk,
                              const SpaceTimeBump& phi, double s,
                              std::size_t probe, int time_nodes) {
  const SpectralBox& box = pk.box();
  const GridSpec& sp = box.spec();
  const std::size_t total = sp.total();
  const double dx = sp.dx();

  // spatial factor and its generator image (same for all times)
  std::vector<double> g(total), Lg(total);
  for (int j = 0; j < sp.n; ++j) g[j] = phi.space(box.coord(j));
  Lg = g;
  box.generator_apply(Lg);
  std::vector<double> qg(total);
  auto q_grid = sample_potential(pk.potential(), box);
  for (std::size_t j = 0; j < total; ++j) qg[j] = q_grid[j] * g[j];

  double t_lo = std::max(phi.t_center - phi.t_width - s,
                         pk.stored_times().front());
  double t_hi = phi.t_center + phi.t_width - s;
  if (t_hi > pk.stored_times().back())
    throw config_error("test function support escapes the stored horizon");
  if (t_hi <= t_lo) return phi.value(s, pk.probes()[probe]);

  // Gauss-Legendre in t over the bump support
  double acc = 0.0;
  for (int k = 0; k < time_nodes; ++k) {
    // composite 8-point GL
    int panel = k / 8;
    int node = k % 8;
    int panels = (time_nodes + 7) / 8;
    double pa = t_lo + (t_hi - t_lo) * panel / panels;
    double pb = t_lo + (t_hi - t_lo) * (panel + 1) / panels;
    static const double xg[4] = {0.183434642495650, 0.525532409916329,
                                 0.796666477413627, 0.960289856497536};
    static const double wg[4] = {0.362683783378362, 0.313706645877887,
                                 0.222381034453374, 0.101228536290376};
    double c = 0.5 * (pa + pb), hw = 0.5 * (pb - pa);
    double tnode = node < 4 ? c - hw * xg[node] : c + hw * xg[node - 4];
    double wnode = hw * wg[node % 4];
    auto slice = pk.tilde_slice(probe, tnode);
    double bt = phi.amplitude * phi.time(s + tnode);
    double bdt = phi.amplitude * phi.time_dt(s + tnode);
    double inner = 0.0;
    for (std::size_t j = 0; j < total; ++j)
      inner += slice[j] * (bdt * g[j] + bt * (Lg[j] + qg[j]));
    acc += wnode * inner * dx;
  }
  return acc + phi.value(s, pk.probes()[probe]);
}

nlohmann::json RegularityReport::to_json() const {
  nlohmann::json j;
  j["hoelder_exponent"] = hoelder_exponent;
  j["predicted_exponent"] = predicted_exponent;
  j["hoelder_span_decades"] = hoelder_span_decades;
  j["gradient_applicable"] = gradient_applicable;
  j["gradient_constant"] = gradient_constant;
  j["gradient_constant_coarse"] = gradient_constant_coarse;
  return j;
}

RegularityReport regularity_report(const PerturbedKernel& pk, double t,
                                   double kato_a, double n_order) {
  RegularityReport rep;
  const SpectralBox& box = pk.box();
  const SymbolTable& tab = box.table();
  const GridSpec& sp = box.spec();
  const double dx = sp.dx();
  const double h = tab.h(t);
  const double alpha1 = tab.profile().alpha1;
  rep.predicted_exponent = alpha1 * (1.0 - 1.0 / kato_a);

  auto slice = pk.tilde_slice(0, t);
  Envelope env{n_order, box.table_ptr()};
  const double y = pk.probes()[0];

  // difference-quotient envelope: bin the max ratio by separation
  auto deltas = logspace(dx, h / 3.0, 28);
  std::vector<double> lx, ly;
  double span_lo = kInf, span_hi = 0.0;
  for (double del : deltas) {
    int k = std::max(1, int(std::lround(del / dx)));
    double dsep = k * dx;
    double best = 0.0;
    for (int j = 0; j < sp.n - k; j += 2) {
      double x = box.coord(j);
      double z = x + dsep;
      if (std::abs(x) > 8.0 * h || std::abs(z) > 8.0 * h) continue;
      double num = std::abs(slice[j + k] - slice[j]);
      double den = env(t, std::abs(x - y)) + env(t, std::abs(z - y));
      best = std::max(best, num / den);
    }
    if (best > 0.0) {
      lx.push_back(std::log(dsep / h));
      ly.push_back(std::log(best));
      rep.hoelder_separations.push_back(dsep);
      rep.hoelder_ratios.push_back(best);
      span_lo = std::min(span_lo, dsep);
      span_hi = std::max(span_hi, dsep);
    }
  }
  rep.hoelder_exponent = linear_fit(lx, ly).slope;
  rep.hoelder_span_decades =
      span_hi > span_lo ? std::log10(span_hi / span_lo) : 0.0;

  // gradient bound when the class parameters admit it
  rep.gradient_applicable =
      alpha1 > 1.0 && kato_a > alpha1 / (alpha1 - 1.0);
  if (rep.gradient_applicable) {
    const double Hinv = 1.0 / tab.H(t);
    auto fit_at = [&](int stride) {
      double best = 0.0;
      for (int j = stride; j < sp.n - stride; j += stride) {
        double x = box.coord(j);
        if (std::abs(x) > 0.4 * sp.x_max) continue;
        double grad =
            (slice[j + stride] - slice[j - stride]) / (2.0 * stride * dx);
        double den = Hinv * env(t, std::abs(x - y));
        best = std::max(best, std::abs(grad) / den);
      }
      return best;
    };
    rep.gradient_constant = fit_at(1);
    rep.gradient_constant_coarse = fit_at(2);
  }
  return rep;
}

double hoelder_seminorm(const std::vector<double>& g, double dx, double beta,
                        double window) {
  const int n = int(g.size());
  int kmax = std::max(1, int(window / dx));
  double best = 0.0;
  for (int k = 1; k <= kmax; k = k < 8 ? k + 1 : k * 2) {
    double sep = std::pow(k * dx, beta);
    for (int j = 0; j + k < n; ++j)
      best = std::max(best, std::abs(g[j + k] - g[j]) / sep);
  }
  return best;
}

nlohmann::json SmoothingCheck::to_json() const {
  nlohmann::json j;
  j["times"] = times;
  j["seminorms"] = seminorms;
  j["fitted_slope"] = fitted_slope;
  j["predicted_slope"] = predicted_slope;
  return j;
}

SmoothingCheck smoothing_check(std::shared_ptr<SpectralBox> box,
                               const Potential& q,
                               const std::vector<double>& times, double beta,
                               double p_norm, DuhamelOptions opts) {
  SmoothingCheck out;
  const GridSpec& sp = box->spec();
  const SymbolTable& tab = box->table();
  // unit-norm step input: indicator of [-w, w] scaled to ||phi||_p = 1
  double w = 1.0;
  double scale = std::pow(2.0 * w, -1.0 / p_norm);
  std::vector<double> phi(sp.total(), 0.0);
  for (int j = 0; j < sp.n; ++j)
    if (std::abs(box->coord(j)) <= w) phi[j] = scale;

  std::vector<double> lt, ls;
  for (double t : times) {
    auto out_fn = semigroup_action(*box, q, phi, t, opts);
    double semi = hoelder_seminorm(out_fn, sp.dx(), beta, tab.h(t));
    out.times.push_back(t);
    out.seminorms.push_back(semi);
    lt.push_back(std::log(tab.H(t)));
    ls.push_back(std::log(semi));
  }
  out.fitted_slope = linear_fit(lt, ls).slope;
  out.predicted_slope = -(beta + double(sp.dim) / p_norm);
  return out;
}

}  // namespace levyheat
