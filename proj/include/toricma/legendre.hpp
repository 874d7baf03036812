#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "toricma/field.hpp"
#include "toricma/solver.hpp"

namespace toricma {

/// Rectangle [t_lo, t_hi] x rows in chart coordinates (t along the edge, y = distance to it).
struct LegendreStrip {
    double t_lo = 0.25;
    double t_hi = 0.75;
    /// Increasing positive row heights.
    std::vector<double> rows;
    /// Cells of the uniform p-grid.
    int p_cells = 64;
};

/// Rows of a graded axis on [0, extent] with the given cell count, kept on (0, y_hi].
std::vector<double> graded_rows(double extent, int cells, double grading, double y_hi);

/// Strip over the middle half of an edge with rows and p-grid matching mesh level K.
LegendreStrip default_strip(const Polygon& polygon, std::size_t edge, int level, double grading, double y_hi = 0.25);

/// u*(p, y) = t p - u(t, y) with p = u_t(t, y), sampled on a tensor grid (p_k, y_j).
struct LegendreField {
    ChartFrame frame;
    LegendreStrip strip;
    std::vector<double> p;
    std::vector<double> y;
    /// Row-major [j * p.size() + k].
    std::vector<double> t;
    std::vector<double> ustar;
    /// Coefficient of the -y log y part of u*, removed analytically before differencing in y.
    double singular = 1.0;

    std::size_t np() const { return p.size(); }
    std::size_t ny() const { return y.size(); }
    double t_at(std::size_t j, std::size_t k) const { return t[j * p.size() + k]; }
    double ustar_at(std::size_t j, std::size_t k) const { return ustar[j * p.size() + k]; }

    /// Inverse transform u(t, y_j) = sup_p (t p - u*(p, y_j)) using Hermite data du*/dp = t.
    double recover(double t, std::size_t row) const;
};

/// Per-row inversion of p = u_t by bracketing and bisection. Throws NonMonotoneSlice when a row
/// has non-increasing u_t.
LegendreField partial_legendre(const ConvexField& u, const ChartFrame& frame, const LegendreStrip& strip,
                               double singular = 1.0);
LegendreField partial_legendre(const Solution& sol, std::size_t edge, const LegendreStrip& strip);

/// Coefficient K(t, y) of K u*_pp + y u*_yy = 0 in chart coordinates.
using KeldyshCoefficient = std::function<double(double t, double y)>;
/// K = H l_edge / prod l = H / prod_{j != edge} l_j.
KeldyshCoefficient keldysh_coefficient(const Solution& sol, std::size_t edge);

struct KeldyshResidual {
    /// Row-major like LegendreField; NaN where no centred differences exist or y is below the floor.
    std::vector<double> residual;
    double sup = 0.0;
    std::size_t arg_row = 0;
    std::size_t arg_col = 0;
    std::size_t evaluated = 0;
    /// Nodes where K <= 0; the equation is then not of Keldysh type.
    std::size_t nonpositive_coefficient = 0;
};

KeldyshResidual keldysh_residual(const LegendreField& lf, const KeldyshCoefficient& K, double y_floor = 1e-3);

struct RoundTrip {
    double max_error = 0.0;
    std::size_t probes = 0;
};
/// Largest |recover(t, y_j) - u(t, y_j)| over interior probe points of each row.
RoundTrip legendre_round_trip(const LegendreField& lf, const ConvexField& u, int probes_per_row = 16);

}  // namespace toricma
