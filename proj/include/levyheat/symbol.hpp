#pragma once

// Characteristic exponent Phi(u) = int (1 - cos<u,y>) nu(y) dy of the jump
// density, its running-max majorant Psi, the generalized (rightmost) inverse
// Psi_inv, and the time-to-space scale functions h(t) = 1/Psi_inv(1/t) and
// H(t) = g^{-1}(1/t) with g(s) = s^d f(s).

#include <string>
#include <vector>

#include "levyheat/numerics.hpp"
#include "levyheat/profile.hpp"

namespace levyheat {

// spherical average of cos(s omega_1) over S^{d-1}: cos, J_0, sinc
double spherical_cos_average(int d, double s);
double one_minus_spherical_cos_average(int d, double s);  // cancellation-safe
double spherical_cos_average_zero(int d, int k);          // k-th positive zero
// derivative of the spherical average and its zeros
double spherical_cos_average_derivative(int d, double s);
double spherical_cos_average_derivative_zero(int d, int k);

// Phi by radial quadrature. The radial integrand is split into a smooth core
// below the first oscillation zero, the plain tail mass, and an accelerated
// alternating sum of half-period contributions.
double compute_symbol(const LevyProfile& p, double u, double rel_tol = 1e-10);

struct SymbolTableOptions {
  int per_decade = 128;
  double t_min = 1e-4;
  double t_max = 10.0;
  double t0 = 1.0;
  double u_min = 0.0;  // 0 = choose from t_max
  double u_max = 0.0;  // 0 = choose from t_min
  double quad_rel_tol = 1e-10;
};

class SymbolTable {
 public:
  static SymbolTable build(const LevyProfile& p, SymbolTableOptions opts = {});

  const LevyProfile& profile() const { return profile_; }
  double t0() const { return opts_.t0; }
  double t_min() const { return opts_.t_min; }
  double t_max() const { return opts_.t_max; }
  double u_min() const { return u_grid_.front(); }
  double u_max() const { return u_grid_.back(); }
  double psi_min() const { return psi_env_.front(); }
  double psi_max() const { return psi_env_.back(); }

  double phi(double u) const;       // interpolated symbol
  // total-range evaluation: 0 at u = 0, power-law extrapolation below the
  // table (where t * Phi is negligible anyway); still throws above u_max
  double phi_extended(double u) const;
  double psi(double r) const;       // running-max majorant
  double psi_inv(double s) const;   // rightmost preimage
  double h(double t) const;         // 1 / Psi_inv(1/t)
  double H(double t) const;         // g^{-1}(1/t), extended linearly past 1/g(2)
  double g(double s) const;         // s^d f(s)
  double g_inv(double v) const;     // inverse of g on (0, 2]

  // CSV rows (quantity, argument, value) for phi/psi/psi_inv/h/H/g
  std::string dump_csv(int samples_per_decade = 16) const;

 private:
  LevyProfile profile_;
  SymbolTableOptions opts_;
  std::vector<double> u_grid_, phi_vals_, psi_env_;
  std::vector<double> log_u_, log_phi_;
  Pchip psi_pchip_;  // log u -> log psi
};

// ratio fits for the comparability statements the table is expected to obey
FitRange fit_asympt_psi(const SymbolTable& t, double r_lo = 0.5,
                        double r_hi = 0.0);
FitRange fit_h_H(const SymbolTable& t, double T);
// first = lower doubling constant against (R/r)^{1/alpha2},
// second = upper against (R/r)^{1/alpha1}
std::pair<FitRange, FitRange> fit_doubling_h(const SymbolTable& t, double T);
FitRange fit_pineq(const SymbolTable& t);
FitRange fit_f_h(const SymbolTable& t);

enum class HScaleBound { IL1, IU1, IL2, IU2 };
// fitted constant in int s^a h(s)^{-b} ds <= C * (closed-form comparison)
// over the scan; returns an empty range if the exponent condition fails.
FitRange fit_h_integral(const SymbolTable& t, double a, double b, double T,
                        HScaleBound kind);

}  // namespace levyheat
