#include "toricma/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "toricma/error.hpp"
#include "toricma/reference_potential.hpp"

namespace toricma {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double sign_of(BarrierSide side) { return side == BarrierSide::Upper ? 1.0 : -1.0; }

}  // namespace

ChartFrame corner_chart(const Polygon& polygon, std::size_t vertex) {
    const Vec2 a = polygon.normal(polygon.prev(vertex));
    const Vec2 c = polygon.normal(vertex);
    const double det = a.x * c.y - a.y * c.x;
    ChartFrame f;
    f.origin = polygon.vertex(vertex);
    f.e1 = Vec2{c.y, -c.x} * (1.0 / det);
    f.e2 = Vec2{-a.y, a.x} * (1.0 / det);
    return f;
}

double corner_jacobian(const Polygon& polygon, std::size_t vertex) {
    return 1.0 / std::abs(cross(polygon.normal(polygon.prev(vertex)), polygon.normal(vertex)));
}

namespace {

double outer_radius(const Polygon& polygon, std::size_t vertex) {
    const std::size_t prev = polygon.prev(vertex);
    const ChartFrame f = corner_chart(polygon, vertex);
    double R = 0.5 * std::min(polygon.edge_length(vertex) * dot(polygon.normal(prev), polygon.tangent(vertex)),
                              polygon.edge_length(prev) * -dot(polygon.normal(vertex), polygon.tangent(prev)));
    while (!polygon.interior(f.to_world(R, R))) R *= 0.5;
    return R;
}

}  // namespace

CornerRhs measure_corner_rhs(const Polygon& polygon, const RhsField& rhs, std::size_t vertex, double R, int samples) {
    const std::size_t prev = polygon.prev(vertex);
    const ChartFrame f = corner_chart(polygon, vertex);
    const double J = corner_jacobian(polygon, vertex);
    if (!(R > 0.0)) R = outer_radius(polygon, vertex);

    std::vector<Point> ys;
    std::vector<double> hs;
    for (int j = 0; j < samples; ++j)
        for (int i = 0; i < samples; ++i) {
            const Point y{R * i / (samples - 1), R * j / (samples - 1)};
            const Point x = f.to_world(y.x, y.y);
            hs.push_back(J * J * rhs(x) / polygon.product_l_except(x, prev, vertex));
            ys.push_back(y);
        }
    CornerRhs out;
    out.R = R;
    out.alpha = rhs.alpha();
    out.a = *std::min_element(hs.begin(), hs.end());
    out.A = *std::max_element(hs.begin(), hs.end());
    for (std::size_t p = 0; p < ys.size(); ++p)
        for (std::size_t q = p + 1; q < ys.size(); ++q)
            out.seminorm = std::max(out.seminorm, std::abs(hs[p] - hs[q]) / std::pow(norm(ys[p] - ys[q]), out.alpha));
    out.holder_norm = std::max(std::abs(out.a), std::abs(out.A)) + out.seminorm;
    return out;
}

CornerRhs self_consistent_corner_rhs(const Polygon& polygon, const RhsField& rhs, std::size_t vertex, int samples) {
    // g(r) = r(data on [0, r]^2) - r is decreasing: larger boxes carry larger norms.
    auto radius = [&](double R) {
        const CornerRhs c = measure_corner_rhs(polygon, rhs, vertex, R, samples);
        return barrier_constants(c.a, c.holder_norm, c.alpha).r;
    };
    double hi = outer_radius(polygon, vertex);
    if (radius(hi) >= hi) return measure_corner_rhs(polygon, rhs, vertex, hi, samples);
    double lo = 0.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radius(mid) > mid ? lo : hi) = mid;
    }
    return measure_corner_rhs(polygon, rhs, vertex, lo > 0.0 ? lo : hi, samples);
}

BarrierConstants barrier_constants(double a, double holder_norm, double alpha) {
    if (!(a > 0.0)) throw Error(ErrorKind::NonPositiveH, "barrier needs a positive lower bound");
    BarrierConstants c;
    c.B = 2.0 / a * holder_norm;
    c.r = std::min(std::pow(a / (4.0 * (holder_norm + 1.0)), 1.0 / alpha),
                   std::pow(alpha * (alpha + 1.0) / 2.0, 1.0 / alpha));
    return c;
}

double Barrier::operator()(double y1, double y2) const {
    const bool along = orientation == BarrierOrientation::AlongEdge;
    const double tang = along ? y1 : y2;
    const double nrm = along ? y2 : y1;
    const double s = sign_of(side);
    return trace(tang) + xlogx(nrm) + s * (A * nrm - B * std::pow(nrm, 1.0 + alpha) / (alpha * (1.0 + alpha)));
}

Barrier build_barrier(const ConvexField& u, const Polygon& polygon, const CornerRhs& rhs, std::size_t vertex,
                      BarrierSide side, BarrierOrientation orientation, double min_radius, int samples) {
    const BarrierConstants c = barrier_constants(rhs.a, rhs.holder_norm, rhs.alpha);
    if (c.r < min_radius)
        throw Error(ErrorKind::RadiusCollapse, "barrier radius below four mesh cells", vertex);
    Barrier b;
    b.vertex = vertex;
    b.side = side;
    b.orientation = orientation;
    b.alpha = rhs.alpha;
    b.B = c.B;
    b.r = c.r;
    b.chart = corner_chart(polygon, vertex);
    const bool along = orientation == BarrierOrientation::AlongEdge;
    const ChartFrame f = b.chart;
    const ConvexField* field = &u;
    // Chart point from (tangential, normal) coordinates.
    auto world = [f, along](double tang, double nrm) {
        return along ? f.to_world(tang, nrm) : f.to_world(nrm, tang);
    };
    b.trace = [field, world](double tang) { return field->value(world(tang, 0.0)); };
    auto v = [&](double tang, double nrm) { return u.value(world(tang, nrm)) - xlogx(tang) - xlogx(nrm); };

    const double r = b.r;
    const double step = r / (samples - 1);
    double prev_near = v(0.0, 0.0);
    double prev_far = v(r, 0.0);
    for (int k = 1; k < samples; ++k) {
        const double nrm = k * step;
        const double near = v(0.0, nrm);
        const double far = v(r, nrm);
        b.dv_near = std::max(b.dv_near, std::abs(near - prev_near) / step);
        b.dv_far = std::max(b.dv_far, std::abs(far - prev_far) / step);
        prev_near = near;
        prev_far = far;
    }
    const int m = std::max(9, samples / 2);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) b.v_sup = std::max(b.v_sup, std::abs(v(r * i / (m - 1), r * j / (m - 1))));

    b.candidates[0] = 2.0 * b.B * std::pow(r, b.alpha) / (b.alpha * (1.0 + b.alpha));
    b.candidates[1] = 2.0 * b.dv_near;
    b.candidates[2] = 2.0 * b.dv_far;
    b.candidates[3] = 4.0 * b.v_sup / r;
    b.A = *std::max_element(b.candidates, b.candidates + 4);

    const double s = sign_of(side);
    b.convex = true;
    for (int k = 1; k < samples; ++k) {
        const double nrm = k * step;
        if (!(1.0 / nrm - s * b.B * std::pow(nrm, b.alpha - 1.0) > 0.0)) b.convex = false;
    }
    for (int k = 1; k + 1 < samples; ++k) {
        const double t = k * step;
        if (b.trace(t + step) - 2 * b.trace(t) + b.trace(t - step) < -1e-12) b.convex = false;
    }
    return b;
}

Barrier build_barrier(const Solution& sol, std::size_t vertex, BarrierSide side, BarrierOrientation orientation) {
    const Polygon& P = sol.polygon();
    const Mesh& m = sol.mesh();
    const auto [i, j] = m.locate_cell(P.vertex(vertex));
    const double cell = std::max(m.xs()[i + 1] - m.xs()[i], m.ys()[j + 1] - m.ys()[j]);
    return build_barrier(sol, P, self_consistent_corner_rhs(P, sol.rhs(), vertex), vertex, side, orientation,
                         4.0 * cell);
}

BarrierMargin verify_barrier(const ConvexField& u, const Barrier& barrier, int n) {
    BarrierMargin out;
    out.min_margin = std::numeric_limits<double>::infinity();
    const double s = sign_of(barrier.side);
    const bool along = barrier.orientation == BarrierOrientation::AlongEdge;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double y1 = barrier.r * i / (n - 1);
            const double y2 = barrier.r * j / (n - 1);
            const double margin = s * (barrier(y1, y2) - u.value(barrier.chart.to_world(y1, y2)));
            ++out.samples;
            if ((along ? j : i) == 0) out.trace_side = std::max(out.trace_side, std::abs(margin));
            if (margin < out.min_margin) {
                out.min_margin = margin;
                out.y1 = y1;
                out.y2 = y2;
            }
        }
    return out;
}

LipschitzConstants lipschitz_check(const ConvexField& u, const Polygon& polygon, std::size_t vertex, double R,
                                   int n) {
    const ChartFrame f = corner_chart(polygon, vertex);
    const double slack = 1e-12 * std::max(1.0, polygon.diameter());
    auto inside = [&](double y1, double y2) { return polygon.contains(f.to_world(y1, y2), slack); };
    auto v = [&](double y1, double y2) {
        const Point x = f.to_world(y1, y2);
        return u.value(x) - u0_eval(polygon, x);
    };
    std::vector<double> grid(n);
    for (int k = 0; k < n; ++k) grid[k] = R * k / (n - 1);
    LipschitzConstants out;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double y1 = grid[i];
            const double y2 = grid[j];
            if (!inside(y1, y2)) continue;
            const double here = v(y1, y2);
            if (y2 > 0.0 && inside(y1, 0.0)) out.normal2 = std::max(out.normal2, std::abs(here - v(y1, 0.0)) / y2);
            if (y1 > 0.0 && inside(0.0, y2)) out.normal1 = std::max(out.normal1, std::abs(here - v(0.0, y2)) / y1);
        }
    return out;
}

}  // namespace toricma
