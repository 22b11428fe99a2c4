#pragma once

// Potentials q: closed-form families (constant, power-law well, indicator
// well), grid samples, or callables. Values may be unbounded at isolated
// points (power well); consumers integrate through the singularity.

#include <functional>
#include <string>
#include <vector>

#include "levyheat/spectral.hpp"

namespace levyheat {

enum class PotentialForm {
  none,
  constant,
  power_well,
  indicator_well,
  grid_sampled,
  custom
};

struct Potential {
  PotentialForm form = PotentialForm::none;
  int dim = 1;
  double c = 0.0;                      // constant
  double gamma = 0.0, cutoff = 1.0;    // |x|^-gamma on |x| <= cutoff
  double depth = 0.0, radius = 1.0;    // -depth on |x| <= radius
  std::vector<double> samples;         // grid_sampled, d = 1
  double sample_x0 = 0.0, sample_dx = 0.0;
  double sample_support = 0.0;
  std::function<double(const Point&)> fn;
  double fn_support = kInf;

  static Potential none_potential(int dim = 1);
  static Potential constant(double value, int dim = 1);
  static Potential power_well(double gamma, double cutoff, int dim = 1);
  static Potential indicator_well(double depth, double radius, int dim = 1);
  static Potential grid_sampled(std::vector<double> values, double x0,
                                double dx, double support, int dim = 1);
  static Potential from_function(std::function<double(const Point&)> f,
                                 double support, int dim = 1);

  double operator()(const Point& x) const;
  double radial(double r) const;       // radially symmetric forms only
  bool radially_symmetric() const;
  bool compact() const { return support_radius() < kInf; }
  double support_radius() const;
  bool zero() const { return form == PotentialForm::none; }
  // singular point set inside [-R, R] (d = 1): where |q| blows up
  std::vector<double> singular_points() const;
  // cell average over [center - dx/2, center + dx/2] (d = 1); analytic for
  // the closed-form families, used when sampling onto FFT grids
  double cell_average(double center, double dx) const;
  std::string describe() const;
};

// sample q onto the grid of a box (cell averages along axis 1 for d = 1)
std::vector<double> sample_potential(const Potential& q, const SpectralBox& box);

}  // namespace levyheat
