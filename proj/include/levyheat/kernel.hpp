#pragma once

// Free heat kernel p(t, x): pointwise values by oscillatory radial
// quadrature, grid slices by FFT on the dual box, spatial gradients, the
// envelope G_n, and the ratio fits for the two-sided kernel estimates,
// translation comparability, 3G/4G, and the difference bound.

#include <memory>
#include <string>
#include <vector>

#include "levyheat/spectral.hpp"

namespace levyheat {

// pointwise Fourier inversion; the kernel is radial, x enters through |x|
double free_density(const SymbolTable& t, double time, double radius,
                    double rel_tol = 1e-10);
// radial derivative dP/d|x|
double free_density_radial_derivative(const SymbolTable& t, double time,
                                      double radius, double rel_tol = 1e-10);
// Cartesian partial derivative
double free_gradient(const SymbolTable& t, double time, const Point& x,
                     int axis, double rel_tol = 1e-10);

// pointwise wrap-around floor of a periodized slice: grid values at or below
// this are dominated by periodization images, not by p itself
double wrap_floor(const LevyProfile& profile, const GridSpec& spec, double t,
                  double radius, double slice_peak);

struct KernelGrid {
  std::shared_ptr<SpectralBox> box;
  std::vector<double> times;
  std::vector<std::vector<double>> slices;
  std::vector<std::vector<std::vector<double>>> gradients;  // [time][axis]
  std::vector<double> mass_defect;
  std::vector<double> alias_bound;

  static KernelGrid build(std::shared_ptr<SpectralBox> box,
                          std::vector<double> times,
                          bool with_gradients = false);

  const GridSpec& spec() const { return box->spec(); }
  double value(std::size_t time_index, const Point& x) const;
  // pointwise noise floor below which grid values are wrap-around dominated
  double noise_floor(std::size_t time_index, double radius) const;
  std::string slice_csv(std::size_t time_index) const;
};

struct Envelope {
  double n = 2.0;
  std::shared_ptr<const SymbolTable> table;
  double operator()(double t, double radius) const;
};

double envelope_Gn(const Envelope& env, double t, double radius);

// inf/sup over the valid grid of p / min(h^{-d}, t f(|x|))
FitRange estimate_comparability(const KernelGrid& grid, std::size_t time_index);
// split variants: |x| <= h(t) against h^{-d}, |x| >= h(t) against t f(|x|)
FitRange fit_small_x_ratio(const KernelGrid& grid, std::size_t time_index);
FitRange fit_large_x_ratio(const KernelGrid& grid, std::size_t time_index);
// sup of p(t, x+y)/p(t, x) over |y| <= h(t)/2
FitRange fit_translation(const KernelGrid& grid, std::size_t time_index);
// sup of min(p(t,x), p(s,y)) / p(t+s, x+y), x,y in B(0,R); indices into times
FitRange fit_3g(const KernelGrid& grid, std::size_t it, std::size_t is,
                std::size_t its, double R);
// 4G with scaling factors (a, b)
FitRange fit_4g(const KernelGrid& grid, std::size_t it, std::size_t is,
                std::size_t its, double a, double b, double R);
// sup of |p(t,x)-p(t,y)| / [(|y-x|/h wedge 1)(G_n(x)+G_n(y))]
FitRange fit_difference(const KernelGrid& grid, std::size_t time_index,
                        double n_order);
// sup of |grad p| / [h(t)^{-1} G_n(t, 2x)]
FitRange fit_gradient_envelope(const KernelGrid& grid, std::size_t time_index,
                               double n_order);

// windowed Chapman-Kolmogorov residual of the free kernel at grid-aligned
// probe offsets: max over probes of |sum_z p(s,x-z)p(t,z-y) dz - p(s+t,x-y)|
// relative to p(s+t, x-y)
double ck_residual_free(const KernelGrid& grid, std::size_t is, std::size_t it,
                        std::size_t its, const std::vector<double>& probe_sep);

// max relative gap between the analytic gradient and a central difference of
// free_density with step dx/8, over radii where the gradient is resolvable
double gradient_fd_deviation(const SymbolTable& t, double time,
                             const std::vector<double>& radii, double step);

}  // namespace levyheat
