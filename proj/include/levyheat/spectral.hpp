#pragma once

// Periodic Fourier box shared by the kernel grid and the perturbation series:
// density slices by inverse FFT of exp(-t Phi), semigroup/generator action as
// dual-grid multipliers. All slice data is row-major over [-X, X)^d with N
// nodes per axis.

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "levyheat/symbol.hpp"

namespace levyheat {

using Point = std::array<double, 3>;

struct GridSpec {
  int dim = 1;
  int n = 1 << 14;
  double x_max = 80.0;

  std::size_t total() const;
  double dx() const { return 2.0 * x_max / n; }
  double du() const;     // pi / x_max
  double u_nyquist() const;  // pi / dx, per axis
  double cell_volume() const;
};

class SpectralBox {
 public:
  SpectralBox(std::shared_ptr<const SymbolTable> table, GridSpec spec);
  ~SpectralBox();
  SpectralBox(const SpectralBox&) = delete;
  SpectralBox& operator=(const SpectralBox&) = delete;

  const GridSpec& spec() const { return spec_; }
  const SymbolTable& table() const { return *table_; }
  std::shared_ptr<const SymbolTable> table_ptr() const { return table_; }

  double coord(int i) const { return -spec_.x_max + i * spec_.dx(); }
  int nearest_index(double x) const;
  double snap(double x) const { return coord(nearest_index(x)); }

  // periodized heat kernel slice p(t, . - y); y need not be a grid node
  std::vector<double> density_slice(double t, const Point& y = {}) const;
  std::vector<double> gradient_slice(double t, int axis,
                                     const Point& y = {}) const;
  // in-place application of exp(tL) to a real grid function
  void semigroup_apply(double t, std::vector<double>& data) const;
  // in-place application of the generator L
  void generator_apply(std::vector<double>& data) const;

  // cubic interpolation along each axis for d = 1, multilinear for d >= 2
  double point_value(const std::vector<double>& slice, const Point& x) const;

  // crude periodization budget: t * surface * int_{X}^inf f r^{d-1} dr
  double alias_tail_estimate(double t) const;

  const std::vector<double>& phi_dual() const { return phi_dual_; }

 private:
  void fft(std::vector<std::complex<double>>& buf, int sign) const;

  std::shared_ptr<const SymbolTable> table_;
  GridSpec spec_;
  std::vector<double> phi_dual_;   // Phi(|u_m|), flattened dual grid
  std::vector<double> u_axis_;     // signed frequency per index, one axis
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
  double profile_tail_;            // int_{X}^inf f r^{d-1} dr * sigma_{d-1}
};

}  // namespace levyheat
