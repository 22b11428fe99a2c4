#pragma once

// Independent low-order ground truth: L + q discretized as a dense symmetric
// matrix on a small periodic grid (jump rates from cell quadrature of nu with
// the minimum-image convention, compensated small jumps folded into a
// discrete-Laplacian correction), exponentiated by symmetric
// eigendecomposition.

#include <Eigen/Dense>
#include <json.hpp>
#include <memory>

#include "levyheat/duhamel.hpp"
#include "levyheat/potential.hpp"
#include "levyheat/profile.hpp"

namespace levyheat {

struct OracleSpec {
  int dim = 1;
  int cells = 256;        // per axis; d=1 <= 512, d=2 <= 64
  double half_width = 20.0;
};

Eigen::MatrixXd discretize_generator(const LevyProfile& profile,
                                     const OracleSpec& spec);

class OracleKernel {
 public:
  static OracleKernel build(const LevyProfile& profile, const Potential& q,
                            const OracleSpec& spec, std::vector<double> times);

  const OracleSpec& spec() const { return spec_; }
  const Eigen::MatrixXd& generator() const { return gen_; }
  const std::vector<double>& times() const { return times_; }
  // density-scaled kernel matrix exp(t(L_h + Q)) / dx^d
  const Eigen::MatrixXd& kernel(std::size_t time_index) const {
    return kernels_[time_index];
  }
  double dx() const { return 2.0 * spec_.half_width / spec_.cells; }
  double node(int i) const { return -spec_.half_width + i * dx(); }
  int node_index(double x) const;

  // exp(t (L_h + Q)) for an arbitrary time, density-scaled
  Eigen::MatrixXd kernel_at(double t) const;

 private:
  OracleSpec spec_;
  Eigen::MatrixXd gen_;
  std::vector<double> q_diag_;
  std::vector<double> times_;
  std::vector<Eigen::MatrixXd> kernels_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

struct OracleComparison {
  double max_rel = 0.0;
  double median_rel = 0.0;
  int points = 0;
  nlohmann::json to_json() const;
};

// oracle rows against p~(t, x, .) restricted to the oracle nodes, excluding
// the outer wrap-around band (20% of the half-width)
OracleComparison compare_with_series(const OracleKernel& oracle,
                                     const PerturbedKernel& pk, double t,
                                     const std::vector<double>& centers);

// same comparison against the free kernel grid (q = 0 case)
OracleComparison compare_with_free(const OracleKernel& oracle,
                                   const KernelGrid& grid,
                                   std::size_t time_index,
                                   const std::vector<double>& centers);

}  // namespace levyheat
