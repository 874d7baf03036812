#pragma once

#include <functional>

namespace toricma {

/// Tanh-sinh quadrature on [a, b]; tolerates integrable endpoint singularities.
/// Throws Error(QuadratureFailure) when the result is not finite or the error estimate exceeds
/// max(tolerance, 1e-6) relative to the L1 norm.
double integrate(const std::function<double(double)>& f, double a, double b, double tolerance = 1e-12);

/// Adaptive 15-point Gauss-Kronrod on [a, b] for smooth integrands.
double integrate_smooth(const std::function<double(double)>& f, double a, double b, double tolerance = 1e-12);

}  // namespace toricma
