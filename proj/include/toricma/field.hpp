#pragma once

#include <cstddef>
#include <functional>

#include "toricma/polygon.hpp"
#include "toricma/types.hpp"

namespace toricma {

/// Value and, up to the requested order, gradient and Hessian at a point.
struct FieldSample {
    double value = 0.0;
    Vec2 grad;
    Sym2 hess;
};

/// Convex function on a closed planar domain. Order 0 is valid on the boundary; orders 1 and 2
/// need interior points.
class ConvexField {
public:
    virtual ~ConvexField() = default;
    virtual FieldSample evaluate(Point x, int order) const = 0;
    /// Closed domain membership with slack.
    virtual bool in_domain(Point x, double slack = 0.0) const = 0;

    double value(Point x) const { return evaluate(x, 0).value; }
    Vec2 gradient(Point x) const { return evaluate(x, 1).grad; }
    Sym2 hessian(Point x) const { return evaluate(x, 2).hess; }
};

/// Field given by closed-form value, gradient and Hessian.
class AnalyticField final : public ConvexField {
public:
    using Value = std::function<double(Point)>;
    using Gradient = std::function<Vec2(Point)>;
    using Hessian = std::function<Sym2(Point)>;
    using Domain = std::function<bool(Point, double)>;

    AnalyticField(Value value, Gradient gradient, Hessian hessian, Domain domain);

    FieldSample evaluate(Point x, int order) const override;
    bool in_domain(Point x, double slack = 0.0) const override { return domain_(x, slack); }

    /// The field plus an affine function c + g.x.
    AnalyticField plus_affine(double c, Vec2 g) const;

private:
    Value value_;
    Gradient gradient_;
    Hessian hessian_;
    Domain domain_;
};

/// Affine chart x = origin + a e1 + b e2.
struct ChartFrame {
    Point origin;
    Vec2 e1{1.0, 0.0};
    Vec2 e2{0.0, 1.0};

    Point to_world(double a, double b) const { return origin + e1 * a + e2 * b; }
    /// Partial derivatives of a field in the frame coordinates.
    double d1(Vec2 grad) const { return dot(grad, e1); }
    double d2(Vec2 grad) const { return dot(grad, e2); }
};

/// Edge i: origin v_i, first axis along T_i, second along the inward normal n_i.
ChartFrame edge_frame(const Polygon& polygon, std::size_t edge);
/// Vertex i: first axis along edge i, second along edge i-1 (pointing away from v_i).
ChartFrame vertex_frame(const Polygon& polygon, std::size_t vertex);

namespace models {

/// x1^2/2 + x2 log x2 on the half plane x2 >= 0.
AnalyticField edge_model();
/// x1 log x1 + x2 log x2 on the quadrant.
AnalyticField corner_model();
/// u0 of the polygon plus an optional quadratic q(x) = (c11 x1^2 + 2 c12 x1 x2 + c22 x2^2)/2.
AnalyticField reference(const Polygon& polygon, Sym2 quadratic = {});

}  // namespace models

}  // namespace toricma
