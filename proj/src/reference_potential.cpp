#include "toricma/reference_potential.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "toricma/error.hpp"

namespace toricma {

namespace {

double boundary_slack(const Polygon& polygon) { return 1e-14 * std::max(1.0, polygon.diameter()); }

double xlogx(double l) { return l > 0.0 ? l * std::log(l) : 0.0; }

void require_closure(const Polygon& polygon, Point x, const char* who) {
    if (!polygon.contains(x, boundary_slack(polygon)))
        throw Error(ErrorKind::PointOutsidePolygon, std::string(who) + " outside the closed polygon",
                    polygon.argmin_l(x));
}

void require_interior(const Polygon& polygon, Point x, const char* who) {
    require_closure(polygon, x, who);
    if (!polygon.interior(x))
        throw Error(ErrorKind::BoundaryPoint, std::string(who) + " needs an interior point", polygon.argmin_l(x));
}

}  // namespace

double u0_eval(const Polygon& polygon, Point x) {
    require_closure(polygon, x, "u0_eval");
    double s = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) s += xlogx(polygon.l(i, x));
    return s;
}

Vec2 u0_gradient(const Polygon& polygon, Point x) {
    require_interior(polygon, x, "u0_gradient");
    Vec2 g;
    for (std::size_t i = 0; i < polygon.size(); ++i) g += polygon.normal(i) * (std::log(polygon.l(i, x)) + 1.0);
    return g;
}

MetricTensor g0_hessian(const Polygon& polygon, Point x) {
    require_interior(polygon, x, "g0_hessian");
    Sym2 h;
    for (std::size_t i = 0; i < polygon.size(); ++i) h += Sym2::outer(polygon.normal(i)) * (1.0 / polygon.l(i, x));
    return h;
}

double u0_partial(const Polygon& polygon, Point x, std::size_t skip_a, std::size_t skip_b) {
    double s = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        if (i != skip_a && i != skip_b) s += xlogx(polygon.l(i, x));
    return s;
}

Vec2 u0_partial_gradient(const Polygon& polygon, Point x, std::size_t skip_a, std::size_t skip_b) {
    Vec2 g;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        if (i != skip_a && i != skip_b) g += polygon.normal(i) * (std::log(polygon.l(i, x)) + 1.0);
    return g;
}

Chart classify_chart(const Polygon& polygon, Point x, double radius) {
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i)
        if (polygon.l(polygon.prev(i), x) < radius && polygon.l(i, x) < radius) return {ChartKind::Vertex, i};
    for (std::size_t i = 0; i < n; ++i)
        if (polygon.l(i, x) < radius) return {ChartKind::Edge, i};
    return {ChartKind::Bulk, 0};
}

namespace {

double sqrt0(double s) { return std::sqrt(std::max(s, 0.0)); }

double chart_distance(const Polygon& polygon, Chart c, Point p, Point q) {
    switch (c.kind) {
        case ChartKind::Bulk: return norm(q - p);
        case ChartKind::Edge: {
            const Vec2 T = polygon.tangent(c.index);
            const double dt = dot(q - p, T);
            return std::abs(dt) + std::abs(sqrt0(polygon.l(c.index, q)) - sqrt0(polygon.l(c.index, p)));
        }
        case ChartKind::Vertex: {
            const std::size_t a = polygon.prev(c.index);
            const std::size_t b = c.index;
            return std::abs(sqrt0(polygon.l(a, q)) - sqrt0(polygon.l(a, p))) +
                   std::abs(sqrt0(polygon.l(b, q)) - sqrt0(polygon.l(b, p)));
        }
    }
    return 0.0;
}

}  // namespace

double g0_distance(const Polygon& polygon, Point p, Point q, double chart_radius) {
    require_closure(polygon, p, "g0_distance");
    require_closure(polygon, q, "g0_distance");
    const Chart cp = classify_chart(polygon, p, chart_radius);
    const Chart cq = classify_chart(polygon, q, chart_radius);
    if (!(cp == cq)) throw Error(ErrorKind::ChartMismatch, "points lie in different charts; split the path");
    return chart_distance(polygon, cp, p, q);
}

double g0_distance_path(const Polygon& polygon, Point p, Point q, double chart_radius) {
    require_closure(polygon, p, "g0_distance_path");
    require_closure(polygon, q, "g0_distance_path");
    // Canonical direction, so the sampled chart splits do not depend on the argument order.
    if (q.x < p.x || (q.x == p.x && q.y < p.y)) std::swap(p, q);
    // Break points where the chart of the segment point changes, located by bisection.
    constexpr int samples = 256;
    auto at = [&](double s) { return p + (q - p) * s; };
    std::vector<double> cuts{0.0};
    Chart current = classify_chart(polygon, p, chart_radius);
    double prev_s = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double s = static_cast<double>(k) / samples;
        const Chart c = classify_chart(polygon, at(s), chart_radius);
        if (!(c == current)) {
            double lo = prev_s;
            double hi = s;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (classify_chart(polygon, at(mid), chart_radius) == current ? lo : hi) = mid;
            }
            cuts.push_back(hi);
            current = c;
        }
        prev_s = s;
    }
    cuts.push_back(1.0);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Point a = at(cuts[k]);
        const Point b = at(cuts[k + 1]);
        total += chart_distance(polygon, classify_chart(polygon, at(0.5 * (cuts[k] + cuts[k + 1])), chart_radius), a, b);
    }
    return total;
}

double g0_segment_length(const Polygon& polygon, Point p, Point q) {
    require_closure(polygon, p, "g0_segment_length");
    require_closure(polygon, q, "g0_segment_length");
    const Vec2 d = q - p;
    if (norm(d) == 0.0) return 0.0;
    auto speed = [&](double s) {
        const Point x = p + d * s;
        double acc = 0.0;
        for (std::size_t i = 0; i < polygon.size(); ++i) {
            const double l = polygon.l(i, x);
            const double nd = dot(polygon.normal(i), d);
            if (nd != 0.0) acc += nd * nd / std::max(l, 1e-300);
        }
        return std::sqrt(acc);
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(speed, 0.0, 1.0);
}

}  // namespace toricma
