#include "toricma/field.hpp"

#include <cmath>

#include "toricma/reference_potential.hpp"

namespace toricma {

AnalyticField::AnalyticField(Value value, Gradient gradient, Hessian hessian, Domain domain)
    : value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)), domain_(std::move(domain)) {}

FieldSample AnalyticField::evaluate(Point x, int order) const {
    FieldSample s;
    s.value = value_(x);
    if (order >= 1) s.grad = gradient_(x);
    if (order >= 2) s.hess = hessian_(x);
    return s;
}

AnalyticField AnalyticField::plus_affine(double c, Vec2 g) const {
    Value v = value_;
    Gradient gr = gradient_;
    return AnalyticField([v, c, g](Point x) { return v(x) + c + dot(g, x); },
                         [gr, g](Point x) { return gr(x) + g; }, hessian_, domain_);
}

ChartFrame edge_frame(const Polygon& polygon, std::size_t edge) {
    return {polygon.vertex(edge), polygon.tangent(edge), polygon.normal(edge)};
}

ChartFrame vertex_frame(const Polygon& polygon, std::size_t vertex) {
    return {polygon.vertex(vertex), polygon.tangent(vertex), -polygon.tangent(polygon.prev(vertex))};
}

namespace models {

namespace {
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace

AnalyticField edge_model() {
    return AnalyticField([](Point x) { return 0.5 * x.x * x.x + xlogx(x.y); },
                         [](Point x) { return Vec2{x.x, std::log(x.y) + 1.0}; },
                         [](Point x) { return Sym2{1.0, 0.0, 1.0 / x.y}; },
                         [](Point x, double slack) { return x.y >= -slack; });
}

AnalyticField corner_model() {
    return AnalyticField([](Point x) { return xlogx(x.x) + xlogx(x.y); },
                         [](Point x) { return Vec2{std::log(x.x) + 1.0, std::log(x.y) + 1.0}; },
                         [](Point x) { return Sym2{1.0 / x.x, 0.0, 1.0 / x.y}; },
                         [](Point x, double slack) { return x.x >= -slack && x.y >= -slack; });
}

AnalyticField reference(const Polygon& polygon, Sym2 q) {
    return AnalyticField([polygon, q](Point x) { return u0_eval(polygon, x) + 0.5 * q.quad(x); },
                         [polygon, q](Point x) { return u0_gradient(polygon, x) + q.apply(x); },
                         [polygon, q](Point x) { return g0_hessian(polygon, x) + q; },
                         [polygon](Point x, double slack) { return polygon.contains(x, slack); });
}

}  // namespace models

}  // namespace toricma
