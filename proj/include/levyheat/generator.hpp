#pragma once

// Pointwise application of the jump generator
//   L phi(x) = int ( phi(x+y) - phi(x) - grad phi(x).y 1_{|y|<1} ) nu(dy)
// by compensated radial quadrature. The symmetric spherical average cancels
// the drift term; the small-jump head uses the finite-difference Laplacian.

#include <functional>

#include "levyheat/profile.hpp"
#include "levyheat/spectral.hpp"

namespace levyheat {

using ScalarField = std::function<double(const Point&)>;

// throws std::domain_error when phi fails a second-difference smoothness probe
double generator_apply(const LevyProfile& profile, const ScalarField& phi,
                       const Point& x, double far_radius = 0.0,
                       double rel_tol = 1e-9);

}  // namespace levyheat
