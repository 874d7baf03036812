#include "toricma/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "toricma/error.hpp"
#include "toricma/rhs.hpp"

namespace toricma {

Polygon Polygon::from_vertices(std::vector<Point> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw Error(ErrorKind::TooFewVertices, "a polygon needs at least three vertices");

    Point lo = vertices[0];
    Point hi = vertices[0];
    for (const Point& p : vertices) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double scale = std::max(norm(hi - lo), 1e-300);

    std::vector<Vec2> dirs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 d = vertices[(i + 1) % n] - vertices[i];
        if (norm(d) <= 1e-14 * scale) throw Error(ErrorKind::CollinearVertices, "repeated vertex", i);
        dirs[i] = d / norm(d);
    }

    // Turn at vertex i is cross(d_{i-1}, d_i); all must be strictly positive.
    std::vector<double> turns(n);
    std::size_t positive = 0;
    std::size_t negative = 0;
    for (std::size_t i = 0; i < n; ++i) {
        turns[i] = cross(dirs[(i + n - 1) % n], dirs[i]);
        if (std::abs(turns[i]) <= 1e-12) {
            if (dot(dirs[(i + n - 1) % n], dirs[i]) > 0.0)
                throw Error(ErrorKind::CollinearVertices, "vertex lies on the line of its neighbours", i);
            throw Error(ErrorKind::NonConvex, "edge folds back on itself", i);
        }
        (turns[i] > 0.0 ? positive : negative) += 1;
    }
    if (positive == 0) throw Error(ErrorKind::WrongOrientation, "vertices are clockwise", 0);
    if (negative > 0) {
        const std::size_t bad = static_cast<std::size_t>(
            std::find_if(turns.begin(), turns.end(), [&](double t) { return positive >= negative ? t < 0.0 : t > 0.0; }) -
            turns.begin());
        if (positive < negative) throw Error(ErrorKind::WrongOrientation, "vertices are clockwise", bad);
        throw Error(ErrorKind::NonConvex, "reflex vertex", bad);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += std::atan2(turns[i], dot(dirs[(i + n - 1) % n], dirs[i]));
    if (std::abs(total - 2.0 * std::numbers::pi) > 1e-9)
        throw Error(ErrorKind::NonConvex, "boundary winds more than once", 0);

    Polygon p;
    p.vertices_ = std::move(vertices);
    p.edges_.resize(n);
    p.lengths_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 normal = rot90(dirs[i]);
        p.edges_[i] = {normal, dot(normal, p.vertices_[i])};
        p.lengths_[i] = norm(p.vertices_[(i + 1) % n] - p.vertices_[i]);
    }
    p.lo_ = lo;
    p.hi_ = hi;
    return p;
}

double Polygon::min_edge_length() const { return *std::min_element(lengths_.begin(), lengths_.end()); }

double Polygon::min_l(Point x) const {
    double m = edges_[0](x);
    for (std::size_t i = 1; i < edges_.size(); ++i) m = std::min(m, edges_[i](x));
    return m;
}

std::size_t Polygon::argmin_l(Point x) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i](x) < edges_[best](x)) best = i;
    return best;
}

double Polygon::product_l(Point x) const {
    double p = 1.0;
    for (const auto& e : edges_) p *= e(x);
    return p;
}

double Polygon::product_l_except(Point x, std::size_t skip_a, std::size_t skip_b) const {
    double p = 1.0;
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (i != skip_a && i != skip_b) p *= edges_[i](x);
    return p;
}

Point Polygon::centroid() const {
    double area = 0.0;
    Vec2 c;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = vertices_[i];
        const Point b = vertices_[(i + 1) % n];
        const double w = cross(a, b);
        area += w;
        c += (a + b) * w;
    }
    return c / (3.0 * area);
}

double compatible_vertex_value(const Polygon& polygon, std::size_t i) {
    const std::size_t im = polygon.prev(i);
    const double d = cross(polygon.normal(im), polygon.normal(i));
    return d * d * polygon.product_l_except(polygon.vertex(i), im, i);
}

CompatibilityReport check_compatibility(const Polygon& polygon, const RhsField& rhs, double tolerance) {
    CompatibilityReport report;
    report.tolerance = tolerance;
    report.compatible = true;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const double required = compatible_vertex_value(polygon, i);
        const double r = rhs(polygon.vertex(i)) - required;
        report.required.push_back(required);
        report.residuals.push_back(r);
        if (!(std::abs(r) <= tolerance * std::max(1.0, std::abs(required)))) report.compatible = false;
    }
    return report;
}

double rho_weight(const Polygon& polygon, Point x) {
    const double slack = 1e-14 * std::max(1.0, polygon.diameter());
    if (!polygon.contains(x, slack))
        throw Error(ErrorKind::PointOutsidePolygon, "rho_weight outside the closed polygon", polygon.argmin_l(x));
    if (polygon.min_l(x) <= 0.0) return 0.0;
    return std::sqrt(polygon.product_l(x));
}

}  // namespace toricma
