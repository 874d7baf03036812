#include "toricma/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "toricma/error.hpp"

namespace toricma {

double integrate(const std::function<double(double)>& f, double a, double b, double tolerance) {
    if (a == b) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        value = integrator.integrate(f, a, b, tolerance, &error, &l1);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::QuadratureFailure, e.what());
    }
    if (!std::isfinite(value) || error > std::max(tolerance, 1e-6) * std::max(l1, 1.0))
        throw Error(ErrorKind::QuadratureFailure, "integral did not converge (error estimate " +
                                                       std::to_string(error) + ")");
    return value;
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b, double tolerance) {
    if (a == b) return 0.0;
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, tolerance, &error);
    if (!std::isfinite(value)) throw Error(ErrorKind::QuadratureFailure, "integral is not finite");
    return value;
}

}  // namespace toricma
