#include "levyheat/potential.hpp"

#include <cmath>
#include <sstream>

namespace levyheat {

Potential Potential::none_potential(int dim) {
  Potential q;
  q.form = PotentialForm::none;
  q.dim = dim;
  return q;
}

Potential Potential::constant(double value, int dim) {
  Potential q;
  q.form = PotentialForm::constant;
  q.c = value;
  q.dim = dim;
  return q;
}

Potential Potential::power_well(double gamma, double cutoff, int dim) {
  // gamma == dim is allowed so the membership machinery can flag the
  // non-integrable boundary case; sampling such a well onto a grid throws
  if (!(gamma <= dim))
    throw config_error("power well exponent must satisfy gamma <= d");
  Potential q;
  q.form = PotentialForm::power_well;
  q.gamma = gamma;
  q.cutoff = cutoff;
  q.dim = dim;
  return q;
}

Potential Potential::indicator_well(double depth, double radius, int dim) {
  Potential q;
  q.form = PotentialForm::indicator_well;
  q.depth = depth;
  q.radius = radius;
  q.dim = dim;
  return q;
}

Potential Potential::grid_sampled(std::vector<double> values, double x0,
                                  double dx, double support, int dim) {
  if (dim != 1) throw config_error("grid_sampled potentials are d = 1 only");
  Potential q;
  q.form = PotentialForm::grid_sampled;
  q.samples = std::move(values);
  q.sample_x0 = x0;
  q.sample_dx = dx;
  q.sample_support = support;
  q.dim = dim;
  return q;
}

Potential Potential::from_function(std::function<double(const Point&)> f,
                                   double support, int dim) {
  Potential q;
  q.form = PotentialForm::custom;
  q.fn = std::move(f);
  q.fn_support = support;
  q.dim = dim;
  return q;
}

double Potential::operator()(const Point& x) const {
  double r = 0.0;
  for (int a = 0; a < dim; ++a) r += x[a] * x[a];
  r = std::sqrt(r);
  switch (form) {
    case PotentialForm::none:
      return 0.0;
    case PotentialForm::constant:
      return c;
    case PotentialForm::power_well:
      if (r > cutoff) return 0.0;
      return std::pow(r, -gamma);
    case PotentialForm::indicator_well:
      return r <= radius ? -depth : 0.0;
    case PotentialForm::grid_sampled: {
      if (std::abs(x[0] - sample_x0) > sample_support) return 0.0;
      double pos = (x[0] - sample_x0) / sample_dx +
                   0.5 * double(samples.size() - 1);
      long j = std::lround(pos);
      if (j < 0 || j >= long(samples.size())) return 0.0;
      return samples[std::size_t(j)];
    }
    case PotentialForm::custom:
      return fn(x);
  }
  return 0.0;
}

double Potential::radial(double r) const {
  return (*this)(Point{r, 0.0, 0.0});
}

bool Potential::radially_symmetric() const {
  return form != PotentialForm::grid_sampled && form != PotentialForm::custom;
}

double Potential::support_radius() const {
  switch (form) {
    case PotentialForm::none:
      return 0.0;
    case PotentialForm::constant:
      return kInf;
    case PotentialForm::power_well:
      return cutoff;
    case PotentialForm::indicator_well:
      return radius;
    case PotentialForm::grid_sampled:
      return sample_support;
    case PotentialForm::custom:
      return fn_support;
  }
  return kInf;
}

std::vector<double> Potential::singular_points() const {
  if (form == PotentialForm::power_well && gamma > 0.0) return {0.0};
  return {};
}

double Potential::cell_average(double center, double dx) const {
  double a = center - 0.5 * dx, b = center + 0.5 * dx;
  switch (form) {
    case PotentialForm::none:
      return 0.0;
    case PotentialForm::constant:
      return c;
    case PotentialForm::power_well: {
      a = std::max(a, -cutoff);
      b = std::min(b, cutoff);
      if (b <= a) return 0.0;
      auto prim = [&](double s) {
        // antiderivative of |s|^{-gamma}, odd around 0
        double mag = std::pow(std::abs(s), 1.0 - gamma) / (1.0 - gamma);
        return s >= 0 ? mag : -mag;
      };
      if (gamma == 1.0) throw config_error("gamma = 1 not integrable in d=1");
      return (prim(b) - prim(a)) / dx;
    }
    case PotentialForm::indicator_well: {
      double lo = std::max(a, -radius), hi = std::min(b, radius);
      double overlap = std::max(0.0, hi - lo);
      return -depth * overlap / dx;
    }
    default:
      return (*this)(Point{center, 0.0, 0.0});
  }
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (form) {
    case PotentialForm::none: os << "none"; break;
    case PotentialForm::constant: os << "constant(" << c << ")"; break;
    case PotentialForm::power_well:
      os << "power_well(gamma=" << gamma << ",R=" << cutoff << ")";
      break;
    case PotentialForm::indicator_well:
      os << "indicator_well(depth=" << depth << ",radius=" << radius << ")";
      break;
    case PotentialForm::grid_sampled: os << "grid_sampled"; break;
    case PotentialForm::custom: os << "custom"; break;
  }
  return os.str();
}

std::vector<double> sample_potential(const Potential& q,
                                     const SpectralBox& box) {
  const GridSpec& s = box.spec();
  if (q.compact() && q.support_radius() > 0.9 * s.x_max)
    throw config_error("potential support exceeds the spatial grid");
  std::vector<double> out(s.total());
  const int n = s.n;
  if (s.dim == 1) {
    for (int i = 0; i < n; ++i)
      out[i] = q.cell_average(box.coord(i), s.dx());
    return out;
  }
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::size_t rem = idx;
    Point x{};
    for (int a = s.dim - 1; a >= 0; --a) {
      x[a] = box.coord(int(rem % n));
      rem /= n;
    }
    out[idx] = q(x);
  }
  return out;
}

}  // namespace levyheat
