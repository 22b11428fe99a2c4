#include "levyheat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace levyheat {

namespace {
constexpr double kPi = 3.14159265358979323846;
std::mutex g_fftw_mutex;  // plan creation is not thread-safe
}  // namespace

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (int a = 0; a < dim; ++a) t *= std::size_t(n);
  return t;
}

double GridSpec::du() const { return kPi / x_max; }

double GridSpec::u_nyquist() const { return kPi / dx(); }

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= dx();
  return v;
}

SpectralBox::SpectralBox(std::shared_ptr<const SymbolTable> table,
                         GridSpec spec)
    : table_(std::move(table)), spec_(spec) {
  const int n = spec_.n;
  if (n < 4 || (n & (n - 1)) != 0)
    throw config_error("grid points per axis must be a power of two >= 4");
  u_axis_.resize(n);
  for (int i = 0; i < n; ++i) {
    int f = (i <= n / 2) ? i : i - n;
    u_axis_[i] = f * spec_.du();
  }
  const std::size_t total = spec_.total();
  phi_dual_.resize(total);
  const double u_cover = spec_.u_nyquist() * std::sqrt(double(spec_.dim));
  if (table_->u_max() < u_cover)
    throw numerical_error(
        "symbol table too narrow for the dual grid; widen it to u_max >= " +
        std::to_string(u_cover));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double uu = 0.0;
    for (int a = spec_.dim - 1; a >= 0; --a) {
      int i = rem % n;
      rem /= n;
      uu += u_axis_[i] * u_axis_[i];
    }
    phi_dual_[idx] = table_->phi_extended(std::sqrt(uu));
  }
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    std::vector<std::complex<double>> probe(total);
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    int dims[3] = {n, n, n};
    plan_fwd_ = fftw_plan_dft(spec_.dim, dims, buf, buf, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft(spec_.dim, dims, buf, buf, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  profile_tail_ =
      sphere_area(spec_.dim) *
      integrate_tail(
          [this](double r) {
            return table_->profile().eval(r) * std::pow(r, spec_.dim - 1);
          },
          spec_.x_max, 1e-8);
}

SpectralBox::~SpectralBox() {
  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void SpectralBox::fft(std::vector<std::complex<double>>& buf, int sign) const {
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(
      static_cast<fftw_plan>(sign == FFTW_FORWARD ? plan_fwd_ : plan_bwd_),
      data, data);
}

int SpectralBox::nearest_index(double x) const {
  int i = int(std::lround((x + spec_.x_max) / spec_.dx()));
  if (i < 0) i = 0;
  if (i >= spec_.n) i = spec_.n - 1;
  return i;
}

std::vector<double> SpectralBox::density_slice(double t, const Point& y) const {
  const std::size_t total = spec_.total();
  const int n = spec_.n;
  std::vector<std::complex<double>> buf(total);
  // per-axis phase e^{-i u (X + y_a)}
  std::array<std::vector<std::complex<double>>, 3> phase;
  for (int a = 0; a < spec_.dim; ++a) {
    phase[a].resize(n);
    for (int i = 0; i < n; ++i) {
      double arg = -u_axis_[i] * (spec_.x_max + y[a]);
      phase[a][i] = {std::cos(arg), std::sin(arg)};
    }
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    double mult = std::exp(-t * phi_dual_[idx]);
    std::complex<double> v(mult, 0.0);
    std::size_t rem = idx;
    for (int a = spec_.dim - 1; a >= 0; --a) {
      v *= phase[a][rem % n];
      rem /= n;
    }
    buf[idx] = v;
  }
  fft(buf, FFTW_BACKWARD);
  const double scale = 1.0 / std::pow(2.0 * spec_.x_max, spec_.dim);
  std::vector<double> out(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = buf[i].real() * scale;
  return out;
}

std::vector<double> SpectralBox::gradient_slice(double t, int axis,
                                                const Point& y) const {
  const std::size_t total = spec_.total();
  const int n = spec_.n;
  std::vector<std::complex<double>> buf(total);
  std::array<std::vector<std::complex<double>>, 3> phase;
  for (int a = 0; a < spec_.dim; ++a) {
    phase[a].resize(n);
    for (int i = 0; i < n; ++i) {
      double arg = -u_axis_[i] * (spec_.x_max + y[a]);
      phase[a][i] = {std::cos(arg), std::sin(arg)};
    }
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    double mult = std::exp(-t * phi_dual_[idx]);
    std::complex<double> v(mult, 0.0);
    std::size_t rem = idx;
    double u_ax = 0.0;
    for (int a = spec_.dim - 1; a >= 0; --a) {
      int i = rem % n;
      rem /= n;
      v *= phase[a][i];
      if (a == axis) u_ax = u_axis_[i];
    }
    buf[idx] = v * std::complex<double>(0.0, u_ax);
  }
  fft(buf, FFTW_BACKWARD);
  const double scale = 1.0 / std::pow(2.0 * spec_.x_max, spec_.dim);
  std::vector<double> out(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = buf[i].real() * scale;
  return out;
}

void SpectralBox::semigroup_apply(double t, std::vector<double>& data) const {
  const std::size_t total = spec_.total();
  std::vector<std::complex<double>> buf(total);
  for (std::size_t i = 0; i < total; ++i) buf[i] = data[i];
  fft(buf, FFTW_FORWARD);
  for (std::size_t i = 0; i < total; ++i) buf[i] *= std::exp(-t * phi_dual_[i]);
  fft(buf, FFTW_BACKWARD);
  const double scale = 1.0 / double(total);
  for (std::size_t i = 0; i < total; ++i) data[i] = buf[i].real() * scale;
}

void SpectralBox::generator_apply(std::vector<double>& data) const {
  const std::size_t total = spec_.total();
  std::vector<std::complex<double>> buf(total);
  for (std::size_t i = 0; i < total; ++i) buf[i] = data[i];
  fft(buf, FFTW_FORWARD);
  for (std::size_t i = 0; i < total; ++i) buf[i] *= -phi_dual_[i];
  fft(buf, FFTW_BACKWARD);
  const double scale = 1.0 / double(total);
  for (std::size_t i = 0; i < total; ++i) data[i] = buf[i].real() * scale;
}

double SpectralBox::point_value(const std::vector<double>& slice,
                                const Point& x) const {
  const int n = spec_.n;
  const double dx = spec_.dx();
  if (spec_.dim == 1) {
    double pos = (x[0] + spec_.x_max) / dx;
    int j = int(std::floor(pos));
    int lo = j - 1;
    if (lo < 0) lo = 0;
    if (lo + 3 >= n) lo = n - 4;
    std::vector<double> xs(4), ys(4);
    for (int k = 0; k < 4; ++k) {
      xs[k] = coord(lo + k);
      ys[k] = slice[lo + k];
    }
    return lagrange4(xs, ys, x[0]);
  }
  // multilinear
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < spec_.dim; ++a) {
    double pos = (x[a] + spec_.x_max) / dx;
    int j = int(std::floor(pos));
    if (j < 0) j = 0;
    if (j >= n - 1) j = n - 2;
    base[a] = j;
    frac[a] = pos - j;
  }
  double acc = 0.0;
  int corners = 1 << spec_.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < spec_.dim; ++a) {
      int bit = (c >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      idx = idx * n + (base[a] + bit);
    }
    acc += w * slice[idx];
  }
  return acc;
}

double SpectralBox::alias_tail_estimate(double t) const {
  return t * profile_tail_;
}

}  // namespace levyheat
