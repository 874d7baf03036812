#pragma once

#include <cstddef>
#include <functional>

#include "toricma/field.hpp"
#include "toricma/polygon.hpp"
#include "toricma/rhs.hpp"
#include "toricma/solver.hpp"

namespace toricma {

/// Vertex chart y = (l_{i-1}(x), l_i(x)); edge i is {y2 = 0}, edge i-1 is {y1 = 0}.
ChartFrame corner_chart(const Polygon& polygon, std::size_t vertex);

/// Jacobian factor |det dx/dy| of the corner chart.
double corner_jacobian(const Polygon& polygon, std::size_t vertex);

/// H in corner coordinates: det D_y^2 u = H_model / (y1 y2) with H_model = J^2 H / prod_{j != i-1, i} l_j.
struct CornerRhs {
    /// Side of the outer chart box [0, R]^2.
    double R = 0.0;
    double a = 0.0;
    double A = 0.0;
    double seminorm = 0.0;
    /// sup |H_model| + [H_model]_alpha on the outer box.
    double holder_norm = 0.0;
    double alpha = 0.5;
};
/// Bounds and Holder data of H_model sampled on [0, R]^2; R <= 0 picks half the shorter adjacent chart extent.
CornerRhs measure_corner_rhs(const Polygon& polygon, const RhsField& rhs, std::size_t vertex, double R = 0.0,
                             int samples = 16);
/// Radius r with r = r(a, ||H_model||) for the data measured on [0, r]^2 itself (bisection).
CornerRhs self_consistent_corner_rhs(const Polygon& polygon, const RhsField& rhs, std::size_t vertex,
                                     int samples = 16);

enum class BarrierSide { Upper, Lower };
/// AlongEdge: profile in y2 above the trace on {y2 = 0} (U). Swapped: roles of y1 and y2 exchanged (U hat).
enum class BarrierOrientation { AlongEdge, Swapped };

struct BarrierConstants {
    double B = 0.0;
    double r = 0.0;
};
/// B = (2/a) ||H||, r = min{(a/(4(||H|| + 1)))^{1/alpha}, (alpha(alpha+1)/2)^{1/alpha}}.
BarrierConstants barrier_constants(double a, double holder_norm, double alpha);

struct Barrier {
    std::size_t vertex = 0;
    BarrierSide side = BarrierSide::Upper;
    BarrierOrientation orientation = BarrierOrientation::AlongEdge;
    double alpha = 0.5;
    double A = 0.0;
    double B = 0.0;
    double r = 0.0;
    /// Measured pieces entering A: sup |v| on Q_r and sup |dv/dn| on the two transversal sides.
    double v_sup = 0.0;
    double dv_near = 0.0;
    double dv_far = 0.0;
    /// Candidates for A in order: 2B r^alpha/(alpha(1+alpha)), 2 dv_near, 2 dv_far, 4 v_sup / r.
    double candidates[4] = {0.0, 0.0, 0.0, 0.0};
    /// Explicit Hessian of the profile sampled positive definite on Q_r.
    bool convex = false;
    ChartFrame chart;
    /// u along the trace side, as a function of the tangential chart coordinate.
    std::function<double(double)> trace;

    /// Barrier value at chart coordinates (y1, y2).
    double operator()(double y1, double y2) const;
};

/// Throws RadiusCollapse when r < min_radius.
Barrier build_barrier(const ConvexField& u, const Polygon& polygon, const CornerRhs& rhs, std::size_t vertex,
                      BarrierSide side, BarrierOrientation orientation, double min_radius = 0.0, int samples = 65);
/// As above with the corner data measured from the solution and min_radius four times the corner cell.
Barrier build_barrier(const Solution& sol, std::size_t vertex, BarrierSide side, BarrierOrientation orientation);

struct BarrierMargin {
    /// min of U+ - u (upper) or u - U- (lower) over the sample grid of Q_r.
    double min_margin = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
    /// max |margin| on the trace side, zero by construction.
    double trace_side = 0.0;
    std::size_t samples = 0;
};
BarrierMargin verify_barrier(const ConvexField& u, const Barrier& barrier, int n = 41);

struct LipschitzConstants {
    /// sup |v(y1,y2) - v(y1,0)| / y2 and sup |v(y1,y2) - v(0,y2)| / y1 with v = u - u0.
    double normal2 = 0.0;
    double normal1 = 0.0;
};
LipschitzConstants lipschitz_check(const ConvexField& u, const Polygon& polygon, std::size_t vertex, double R,
                                   int n = 33);

}  // namespace toricma
