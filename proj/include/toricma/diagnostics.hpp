#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "toricma/boundary_data.hpp"
#include "toricma/field.hpp"
#include "toricma/polygon.hpp"
#include "toricma/solver.hpp"

namespace toricma {

/// u*(x) = u(x) - u(p) - grad u(p).(x - p).
struct NormalizedFrame {
    Point base;
    double value = 0.0;
    Vec2 grad;
    const ConvexField* field = nullptr;

    double operator()(Point x) const { return field->value(x) - value - dot(grad, x - base); }
    Vec2 gradient(Point x) const { return field->gradient(x) - grad; }
};

NormalizedFrame normalize(const ConvexField& u, Point p);

/// D = [u(t,0) - u(t,s) + s u_2(t,s)] / s in the frame coordinates.
double donaldson_D(const ConvexField& u, const ChartFrame& frame, double t, double s);
/// Edge-chart form; ChartMismatch when (t, s) leaves the chart or comes within margin of a vertex.
double donaldson_D(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t, double s,
                   double margin);

/// E = [u(2e,0) + u(0,2e) - 2u(e,e)] / e in the vertex frame.
double donaldson_E(const ConvexField& u, const ChartFrame& frame, double eps);
double donaldson_E(const ConvexField& u, const Polygon& polygon, std::size_t vertex, double eps);

struct DonaldsonPair {
    double D1 = 0.0;
    double D2 = 0.0;
};
/// D1 = u*(p1,0)/p2 and D2 = u*(0,p2)/p1 with u normalised at (p1, p2) in the vertex frame.
DonaldsonPair donaldson_D1_D2(const ConvexField& u, const ChartFrame& frame, double p1, double p2);
DonaldsonPair donaldson_D1_D2(const ConvexField& u, const Polygon& polygon, std::size_t vertex, double p1, double p2);

struct DecayRow {
    int k = 0;
    double s = 0.0;
    double D = 0.0;
    double scaled = 0.0;
};
struct DecayTable {
    double gamma = 0.0;
    std::vector<DecayRow> rows;
    /// Strictly decreasing scaled column over the last tail_steps steps.
    bool tail_decreasing = false;
    bool last_below_first = false;
};
/// Rows s = 2^{-k}, k = kmin..kmax, with s^{1-gamma} D.
DecayTable decay_check(const ConvexField& u, const ChartFrame& frame, double t, double gamma, int kmin = 1,
                       int kmax = 12, int tail_steps = 5);

/// u_1(q1 + delta, q2) - u_1(q1 - delta, q2) in the frame.
double delta_integral(const ConvexField& u, const ChartFrame& frame, double delta, Point q);
/// The same quantity as the integral of u_11 along the segment.
double delta_integral_quadrature(const ConvexField& u, const ChartFrame& frame, double delta, Point q);

struct SectionExtent {
    /// Bounding box of {u* < h} in edge-frame coordinates.
    double t_min = 0.0;
    double t_max = 0.0;
    double s_min = 0.0;
    double s_max = 0.0;
    bool touches_boundary = false;
    /// {u* < h} lies in {s > eps/2}.
    bool inclusion = false;
};
/// Sub-level set of u normalised at (t, eps), traced by bisection along rays from the base point.
SectionExtent section_extent(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t, double eps,
                             double h, int directions = 64);

/// Largest c with {u* < c eps} inside {s > eps/2}: the minimum of u* on the chord s = eps/2, divided by eps.
double section_constant(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t, double eps);

struct Comparability {
    double C = 0.0;
    std::size_t arg = 0;
    Point point;
    bool indefinite = false;
};
/// max over nodes of max(lambda_max, 1/lambda_min) for (D^2 u0)^{-1/2} D_h^2 u (D^2 u0)^{-1/2}.
Comparability hessian_comparability(const Solution& sol);
/// The same over given points of a field.
Comparability hessian_comparability(const ConvexField& u, const Polygon& polygon, std::span<const Point> points);
/// Single-pencil value for reference matrices.
double comparability_constant(const Sym2& reference, const Sym2& hessian);

struct RescaledEdge {
    Point base;
    double D = 0.0;
    double lambda0 = 0.0;
    /// u~(x1, x2) = u*(t0 + lambda0 x1, s0 x2) / (s0 D).
    std::function<double(double, double)> evaluate;
    /// Measured slope C = du~/dx1 (0, 0) and curvature bound A on the boundary line.
    double C = 0.0;
    double A = 0.0;
    /// min over [0,1] of 1 - u~(0, x2).
    double margin_normal = 0.0;
    /// min over [-window, window] of 1 + C x1 + (A/2) x1^2 - u~(x1, 0).
    double margin_boundary = 0.0;
    double at_origin = 0.0;
    double at_base = 0.0;
};
/// Throws WindowExceedsDomain when the rescaled window leaves the edge chart.
RescaledEdge rescale_edge(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t0, double s0,
                          double window = 1.0, int samples = 101);

/// F(zeta) = zeta log((1 + zeta)/(1 - zeta)) and its inverse on (0, 1).
double scaling_F(double zeta);
double scaling_F_inverse(double target);

struct VertexScaling {
    double lambda = 0.0;
    double zeta = 0.0;
    double ratio = 0.0;
    double integral = 0.0;
};
/// Solves lambda * int_{p1-lambda}^{p1+lambda} u_11(t, 0) dt = p2 D1 for zeta = lambda/p1 in (0, 1).
VertexScaling vertex_scaling_lambda(double p1, double p2, double D1, const EdgeTrace& trace);

struct ConvexityModulus {
    double M = 0.0;
    Point p;
    Point x;
};
/// inf over p in P_{2 delta}, x on the boundary of P_delta of u(x) - u(p) - grad u(p).(x - p).
ConvexityModulus strict_convexity_modulus(const ConvexField& u, const Polygon& polygon, double delta,
                                          int grid = 21, int boundary_samples = 256);

struct Box {
    Point lo;
    Point hi;
};
/// Monge-Ampere measure of the piecewise-linear interpolant of grid values (each cell split along
/// its rising diagonal): at each vertex the area of the hull of adjacent triangle gradients,
/// weighted by the share of its dual cell inside region.
double ma_measure_pl(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& values,
                     const Box& region);
/// Samples u on a uniform n x n grid covering region plus one cell, then applies ma_measure_pl.
double ma_measure_oracle(const ConvexField& u, const Box& region, int n = 65);

struct DiagnosticsParams {
    double gamma = -1.0;  ///< negative: alpha / 2
    double vertex_margin_fraction = 0.1;
    int t_points = 33;
    int kmin = 1;
    int kmax = 12;
    double delta = 0.1;
    double rescale_s0 = 0.05;
    std::vector<double> section_eps{0.2, 0.1, 0.05, 0.025};
};

struct Located {
    double value = 0.0;
    std::size_t index = 0;
    Point point;
    double a = 0.0;
    double b = 0.0;
};

struct DiagnosticsReport {
    Located sup_D;
    Located sup_E;
    Located sup_D1;
    Located sup_D2;
    Comparability hessian;
    std::vector<DecayTable> decay;
    std::vector<double> section_eps;
    std::vector<double> section_C;
    double section_C_min = 0.0;
    RescaledEdge rescaled;
    ConvexityModulus modulus;
    double delta_value = 0.0;
    double delta_quadrature = 0.0;
    VertexScaling scaling;
    bool scaling_ok = false;
};

DiagnosticsReport run_diagnostics(const Solution& sol, const DiagnosticsParams& params = {});

}  // namespace toricma
