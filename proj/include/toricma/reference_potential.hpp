#pragma once

#include <cstddef>

#include "toricma/polygon.hpp"
#include "toricma/types.hpp"

namespace toricma {

using MetricTensor = Sym2;

/// u0 = sum_i l_i log l_i with 0 log 0 = 0.
double u0_eval(const Polygon& polygon, Point x);
/// grad u0 = sum_i n_i (log l_i + 1) at an interior point.
Vec2 u0_gradient(const Polygon& polygon, Point x);
/// D^2 u0 = sum_i n_i n_i^T / l_i at an interior point.
MetricTensor g0_hessian(const Polygon& polygon, Point x);

/// sum_{j not in {a, b}} l_j log l_j; smooth wherever those l_j are positive.
double u0_partial(const Polygon& polygon, Point x, std::size_t skip_a, std::size_t skip_b);
Vec2 u0_partial_gradient(const Polygon& polygon, Point x, std::size_t skip_a, std::size_t skip_b);

enum class ChartKind { Bulk, Edge, Vertex };

/// Boundary chart containing a point: vertex i when l_{i-1}, l_i < radius, edge i when l_i < radius.
struct Chart {
    ChartKind kind = ChartKind::Bulk;
    std::size_t index = 0;
    bool operator==(const Chart&) const = default;
};

Chart classify_chart(const Polygon& polygon, Point x, double radius);

/// Chart formula for d_{g0}: |t2-t1| + |sqrt s2 - sqrt s1| on edges, square roots in both coordinates
/// at vertices, Euclidean in the bulk. Throws ChartMismatch when p and q lie in different charts.
double g0_distance(const Polygon& polygon, Point p, Point q, double chart_radius = 0.25);

/// Sum of chart distances along the straight segment, split where the chart changes.
double g0_distance_path(const Polygon& polygon, Point p, Point q, double chart_radius = 0.25);

/// Length of the straight segment in the metric g0, by quadrature.
double g0_segment_length(const Polygon& polygon, Point p, Point q);

}  // namespace toricma
