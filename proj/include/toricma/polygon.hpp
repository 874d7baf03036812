#pragma once

#include <cstddef>
#include <vector>

#include "toricma/types.hpp"

namespace toricma {

/// Affine function l(x) = n.x - offset with unit normal n.
struct AffineFunction {
    Vec2 normal;
    double offset = 0.0;

    double operator()(Point x) const { return dot(normal, x) - offset; }
};

/// Convex polygon {l_i > 0}. Edge i runs from vertex i to vertex i+1; vertex i joins edges i-1 and i.
class Polygon {
public:
    /// Validates orientation and strict convexity of a counterclockwise vertex list.
    static Polygon from_vertices(std::vector<Point> vertices);

    std::size_t size() const { return vertices_.size(); }
    std::size_t prev(std::size_t i) const { return (i + size() - 1) % size(); }
    std::size_t next(std::size_t i) const { return (i + 1) % size(); }

    const std::vector<Point>& vertices() const { return vertices_; }
    Point vertex(std::size_t i) const { return vertices_[i]; }
    const AffineFunction& edge_function(std::size_t i) const { return edges_[i]; }
    Vec2 normal(std::size_t i) const { return edges_[i].normal; }
    /// Unit tangent, rot_{-90}(n_i); points from vertex i to vertex i+1.
    Vec2 tangent(std::size_t i) const { return rot_minus90(edges_[i].normal); }
    double offset(std::size_t i) const { return edges_[i].offset; }
    double edge_length(std::size_t i) const { return lengths_[i]; }
    double min_edge_length() const;

    double l(std::size_t i, Point x) const { return edges_[i](x); }
    /// Smallest l_i(x), the distance to the boundary for interior x.
    double min_l(Point x) const;
    std::size_t argmin_l(Point x) const;
    double product_l(Point x) const;
    /// Product of l_j over j outside the given set of at most two indices.
    double product_l_except(Point x, std::size_t skip_a, std::size_t skip_b) const;

    /// Closure membership with absolute slack.
    bool contains(Point x, double slack = 0.0) const { return min_l(x) >= -slack; }
    bool interior(Point x) const { return min_l(x) > 0.0; }

    Point lower_corner() const { return lo_; }
    Point upper_corner() const { return hi_; }
    Point centroid() const;
    /// Geometric scale used for relative tolerances.
    double diameter() const { return norm(hi_ - lo_); }

    /// Point on edge i at arclength t from vertex i.
    Point edge_point(std::size_t i, double t) const { return vertices_[i] + tangent(i) * t; }

private:
    std::vector<Point> vertices_;
    std::vector<AffineFunction> edges_;
    std::vector<double> lengths_;
    Point lo_;
    Point hi_;
};

class RhsField;

/// Vertex residuals H(v_i) - det(n_{i-1}, n_i)^2 prod_{j != i-1, i} l_j(v_i).
struct CompatibilityReport {
    std::vector<double> residuals;
    std::vector<double> required;
    double tolerance = 0.0;
    bool compatible = false;
};

/// The value H must take at vertex i.
double compatible_vertex_value(const Polygon& polygon, std::size_t i);

CompatibilityReport check_compatibility(const Polygon& polygon, const RhsField& rhs, double tolerance = 1e-8);

/// sqrt(prod_i l_i(x)); zero exactly on the boundary.
double rho_weight(const Polygon& polygon, Point x);

}  // namespace toricma
