#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "toricma/expression.hpp"
#include "toricma/polygon.hpp"
#include "toricma/rhs.hpp"

namespace fixtures {

using toricma::Point;
using toricma::Polygon;
using toricma::RhsField;

inline Polygon square() { return Polygon::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }
inline Polygon triangle() { return Polygon::from_vertices({{0, 0}, {1, 0}, {0, 1}}); }

/// Right-hand side from an expression over x1, x2, l_i and prod_l of the given polygon.
inline RhsField expr_rhs(const Polygon& P, const std::string& source, double a, double A, double alpha = 0.5,
                         bool smooth = false) {
    auto e = std::make_shared<toricma::Expression>(toricma::Expression::parse(source));
    return RhsField([e, P](Point x) { return e->evaluate(x, &P); }, a, A, alpha, 0.0, smooth);
}

/// 1 + (x1 x2 (1 - x1)(1 - x2))^(1/2): Holder of exponent 1/2, equal to 1 at the square's vertices.
inline RhsField holder_rhs(const Polygon& P) { return expr_rhs(P, "1 + (x1*x2*(1-x1)*(1-x2))^0.5", 1.0, 1.25); }

/// 1 - prod l: with vertex values (0, 0, 1, 0) the solution is u0 + x1 x2.
inline RhsField x1x2_rhs(const Polygon& P) { return expr_rhs(P, "1 - prod_l", 15.0 / 16.0, 1.0, 0.5, true); }

inline std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

}  // namespace fixtures
