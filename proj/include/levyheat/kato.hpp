#pragma once

// Potential kernel V_t^a(x) = (int_0^t p(s,x)^a ds)^{1/a}, the modulus
// I_r^a(q) = sup_x int_{|y-x|<r} V_{t0}^a(y-x) |q(y)| dy, and the Kato-class
// membership test with its equivalent small-time characterization.

#include <json.hpp>
#include <memory>

#include "levyheat/kernel.hpp"
#include "levyheat/potential.hpp"

namespace levyheat {

// a local singularity of q * V too strong to integrate
struct kato_divergence : numerical_error {
  double witness;
  kato_divergence(const std::string& what, double w)
      : numerical_error(what), witness(w) {}
};

// direct quadrature of V_t^a at radius rho; time nodes are graded into s = 0
// and into both sides of the regime crossover s = 1/Psi(1/rho)
double potential_kernel_V(const SymbolTable& tab, double a, double t,
                          double rho, double rel_tol = 1e-8);

// the same quantity with p replaced by its two-sided estimate shape
// min(h(s)^{-d}, s f(rho)); captures the exact small-rho regime (including
// the logarithmic boundary cases) at the cost of an overall constant
double kernel_estimate_V(const SymbolTable& tab, double a, double t,
                         double rho);

// radial table of V_t^a for fast reuse inside the modulus integrals; below
// the tabulated range the estimate shape continues the table, matched at the
// lower edge
class PotentialKernelTable {
 public:
  PotentialKernelTable() = default;
  PotentialKernelTable(std::shared_ptr<const SymbolTable> tab, double a,
                       double t, double rho_max, int per_decade = 24);
  double operator()(double rho) const;
  double t() const { return t_; }
  double a() const { return a_; }

 private:
  double a_ = 1.0, t_ = 1.0;
  std::vector<double> log_rho_, log_v_;
  std::vector<double> shape_log_rho_, shape_log_v_;
  double shape_match_ = 1.0;
};

// sup over centers of int_{|y-c|<r} V(|y-c|) |q(y)| dy; throws
// kato_divergence when the local integral refuses to converge
double kato_modulus_I(const PotentialKernelTable& V, const Potential& q,
                      double r, const std::vector<double>& centers,
                      double* argmax = nullptr);

// sup over centers of int_{R^d} |q(y)| V_t(kappa |y-c|) dy (the small-time
// characterization integrand; kappa = 1 unless testing dilation bounds)
double kato_time_form(const PotentialKernelTable& V, const Potential& q,
                      const std::vector<double>& centers, double kappa = 1.0);

// sup over centers of int_{|y-c|<r} |q(y)| dy
double local_integral_sup(const Potential& q, double r,
                          const std::vector<double>& centers, int dim);

// center scan: origin, points straddling the support boundary, and seeded
// random points in the support box
std::vector<double> kato_center_scan(const Potential& q, int n_random,
                                     std::uint64_t seed);

struct MembershipReport {
  double a = 1.0;
  std::vector<double> r_sequence, I_values;
  std::vector<double> t_sequence, time_form_values;
  std::string verdict;  // member | non_member | divergent
  bool verdicts_agree = false;
  double fitted_slope = 0.0, time_slope = 0.0;
  double argmax_center = 0.0;
  std::vector<std::string> warnings;
  nlohmann::json to_json() const;
};

MembershipReport kato_membership(std::shared_ptr<const SymbolTable> tab,
                                 const Potential& q, double a,
                                 std::uint64_t seed = 42,
                                 int levels = 16);

// sup over |y-x| >= 6r of
//   int_{|z-x|>=r, |z-y|>=r} f(|z-x|) |q(z)| f(|y-z|) dz / (M_q f(|y-x|))
FitRange fit_potential_profile_convolution(const SymbolTable& tab,
                                           const Potential& q, double r,
                                           double sep_max = 40.0);

// fitted constant in the space-time convolution bound:
//   sup_x int |q| (int_0^t p(s, kappa(z-x))^a ds)^{1/a} dz
//     <= C (1 + (t Psi(1/r))^{1/a}) I_r^a(q)
FitRange fit_spacetime_convolution(std::shared_ptr<const SymbolTable> tab,
                                   const Potential& q, double a, double kappa,
                                   std::uint64_t seed = 42);

}  // namespace levyheat
