#include "toricma/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "toricma/error.hpp"
#include "toricma/kernels.hpp"
#include "toricma/quadrature.hpp"
#include "toricma/reference_potential.hpp"

namespace toricma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Parameter interval of {base + r d : r in R} inside the closed polygon.
std::pair<double, double> chord(const Polygon& P, Point base, Vec2 d) {
    double lo = -kInf;
    double hi = kInf;
    for (std::size_t j = 0; j < P.size(); ++j) {
        const double l0 = P.l(j, base);
        const double dl = dot(P.normal(j), d);
        if (std::abs(dl) < 1e-15) {
            if (l0 < 0.0) return {1.0, 0.0};
            continue;
        }
        const double r = -l0 / dl;
        if (dl > 0.0)
            lo = std::max(lo, r);
        else
            hi = std::min(hi, r);
    }
    return {lo, hi};
}

/// Pulls a point that rounding placed just outside the polygon back onto its boundary.
Point onto_boundary(const Polygon& P, Point x) {
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < P.size(); ++j) {
            const double l = P.l(j, x);
            if (l < 0.0) x = x - P.normal(j) * l;
        }
    return x;
}

void check_edge_chart(const Polygon& P, std::size_t edge, double t, double s, double margin) {
    const double L = P.edge_length(edge);
    if (!(s > 0.0) || t < margin || t > L - margin)
        throw Error(ErrorKind::ChartMismatch, "probe point outside the edge chart", edge);
    if (!P.interior(P.edge_point(edge, t) + P.normal(edge) * s))
        throw Error(ErrorKind::ChartMismatch, "probe point outside the polygon", edge);
}

void check_vertex_chart(const Polygon& P, std::size_t vertex, const ChartFrame& f, double p1, double p2) {
    if (!(p1 > 0.0) || !(p2 > 0.0) || p1 >= P.edge_length(vertex) || p2 >= P.edge_length(P.prev(vertex)))
        throw Error(ErrorKind::ChartMismatch, "probe point outside the vertex chart", vertex);
    if (!P.interior(f.to_world(p1, p2)))
        throw Error(ErrorKind::ChartMismatch, "probe point outside the polygon", vertex);
}

double golden_min(const std::function<double(double)>& f, double a, double b, int iterations = 90) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < iterations; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::min({fc, fd, f(a), f(b)});
}

}  // namespace

NormalizedFrame normalize(const ConvexField& u, Point p) {
    if (!u.in_domain(p) || !u.in_domain(p, -1e-14))
        throw Error(ErrorKind::PointOutsidePolygon, "normalisation point must be interior");
    const FieldSample s = u.evaluate(p, 1);
    return {p, s.value, s.grad, &u};
}

double donaldson_D(const ConvexField& u, const ChartFrame& frame, double t, double s) {
    const FieldSample at = u.evaluate(frame.to_world(t, s), 1);
    const double boundary = u.value(frame.to_world(t, 0.0));
    return (boundary - at.value + s * frame.d2(at.grad)) / s;
}

double donaldson_D(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t, double s,
                   double margin) {
    check_edge_chart(polygon, edge, t, s, margin);
    return donaldson_D(u, edge_frame(polygon, edge), t, s);
}

double donaldson_E(const ConvexField& u, const ChartFrame& frame, double eps) {
    const double a = u.value(frame.to_world(2 * eps, 0.0));
    const double b = u.value(frame.to_world(0.0, 2 * eps));
    const double c = u.value(frame.to_world(eps, eps));
    return (a + b - 2 * c) / eps;
}

double donaldson_E(const ConvexField& u, const Polygon& polygon, std::size_t vertex, double eps) {
    const double limit = 0.5 * std::min(polygon.edge_length(vertex), polygon.edge_length(polygon.prev(vertex)));
    if (!(eps > 0.0) || eps >= limit)
        throw Error(ErrorKind::ChartMismatch, "eps must lie below half the adjacent edge lengths", vertex);
    return donaldson_E(u, vertex_frame(polygon, vertex), eps);
}

DonaldsonPair donaldson_D1_D2(const ConvexField& u, const ChartFrame& frame, double p1, double p2) {
    const FieldSample at = u.evaluate(frame.to_world(p1, p2), 1);
    const double on1 = u.value(frame.to_world(p1, 0.0));
    const double on2 = u.value(frame.to_world(0.0, p2));
    DonaldsonPair out;
    out.D1 = (on1 - at.value + p2 * frame.d2(at.grad)) / p2;
    out.D2 = (on2 - at.value + p1 * frame.d1(at.grad)) / p1;
    return out;
}

DonaldsonPair donaldson_D1_D2(const ConvexField& u, const Polygon& polygon, std::size_t vertex, double p1,
                              double p2) {
    const ChartFrame f = vertex_frame(polygon, vertex);
    check_vertex_chart(polygon, vertex, f, p1, p2);
    return donaldson_D1_D2(u, f, p1, p2);
}

DecayTable decay_check(const ConvexField& u, const ChartFrame& frame, double t, double gamma, int kmin, int kmax,
                       int tail_steps) {
    DecayTable table;
    table.gamma = gamma;
    for (int k = kmin; k <= kmax; ++k) {
        DecayRow row;
        row.k = k;
        row.s = std::ldexp(1.0, -k);
        row.D = donaldson_D(u, frame, t, row.s);
        row.scaled = std::pow(row.s, 1.0 - gamma) * row.D;
        table.rows.push_back(row);
    }
    const std::size_t n = table.rows.size();
    if (n >= 2) {
        table.last_below_first = table.rows.back().scaled < table.rows.front().scaled;
        const std::size_t steps = std::min<std::size_t>(static_cast<std::size_t>(std::max(tail_steps, 1)), n - 1);
        table.tail_decreasing = true;
        for (std::size_t r = n - steps; r < n; ++r)
            if (!(table.rows[r].scaled < table.rows[r - 1].scaled)) table.tail_decreasing = false;
    }
    return table;
}

double delta_integral(const ConvexField& u, const ChartFrame& frame, double delta, Point q) {
    const double right = frame.d1(u.gradient(frame.to_world(q.x + delta, q.y)));
    const double left = frame.d1(u.gradient(frame.to_world(q.x - delta, q.y)));
    return right - left;
}

double delta_integral_quadrature(const ConvexField& u, const ChartFrame& frame, double delta, Point q) {
    // Composite rule: interpolated Hessians are only piecewise smooth, which stalls adaptive refinement.
    auto u11 = [&](double a) { return u.hessian(frame.to_world(a, q.y)).quad(frame.e1); };
    constexpr int panels = 256;
    const double w = 2 * delta / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = q.x - delta + k * w;
        total += boost::math::quadrature::gauss<double, 7>::integrate(u11, a, a + w);
    }
    return total;
}

SectionExtent section_extent(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t, double eps,
                             double h, int directions) {
    const ChartFrame f = edge_frame(polygon, edge);
    const Point p = f.to_world(t, eps);
    const NormalizedFrame N = normalize(u, p);
    SectionExtent out;
    out.t_min = out.t_max = t;
    out.s_min = out.s_max = eps;
    const double pi = std::acos(-1.0);
    for (int k = 0; k < directions; ++k) {
        const double th = 2 * pi * k / directions;
        const Vec2 d = f.e1 * std::cos(th) + f.e2 * std::sin(th);
        const double rb = chord(polygon, p, d).second;
        double r = 0.0;
        const Point far = onto_boundary(polygon, p + d * rb);
        if (N(far) < h) {
            out.touches_boundary = true;
            r = rb;
        } else {
            double lo = 0.0;
            double hi = rb;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (N(p + d * mid) < h ? lo : hi) = mid;
            }
            r = lo;
        }
        const double a = t + r * std::cos(th);
        const double b = eps + r * std::sin(th);
        out.t_min = std::min(out.t_min, a);
        out.t_max = std::max(out.t_max, a);
        out.s_min = std::min(out.s_min, b);
        out.s_max = std::max(out.s_max, b);
    }
    out.inclusion = !out.touches_boundary && out.s_min > 0.5 * eps;
    return out;
}

double section_constant(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t, double eps) {
    const ChartFrame f = edge_frame(polygon, edge);
    const NormalizedFrame N = normalize(u, f.to_world(t, eps));
    const Point base = f.to_world(0.0, 0.5 * eps);
    const auto [lo, hi] = chord(polygon, base, f.e1);
    auto g = [&](double a) { return N(onto_boundary(polygon, base + f.e1 * a)); };
    return golden_min(g, lo, hi) / eps;
}

double comparability_constant(const Sym2& reference, const Sym2& hessian) {
    double out = 0.0;
    kernels::comparability(&reference.xx, &reference.xy, &reference.yy, &hessian.xx, &hessian.xy, &hessian.yy, 1,
                           &out);
    return out;
}

namespace {

Comparability reduce_comparability(const std::vector<double>& c, const std::vector<Point>& points) {
    Comparability out;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (!std::isfinite(c[k])) {
            out.C = kInf;
            out.arg = k;
            out.point = points[k];
            out.indefinite = true;
            return out;
        }
        if (k == 0 || c[k] > out.C) {
            out.C = c[k];
            out.arg = k;
            out.point = points[k];
        }
    }
    return out;
}

}  // namespace

Comparability hessian_comparability(const Solution& sol) {
    const Mesh& m = sol.mesh();
    const std::size_t n = m.unknowns();
    std::vector<double> b11(n), b12(n), b22(n), c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Sym2 H = sol.discrete_hessian(k);
        b11[k] = H.xx;
        b12[k] = H.xy;
        b22[k] = H.yy;
    }
    kernels::comparability(m.d2u0_11().data(), m.d2u0_12().data(), m.d2u0_22().data(), b11.data(), b12.data(),
                           b22.data(), n, c.data());
    return reduce_comparability(c, m.interior_points());
}

Comparability hessian_comparability(const ConvexField& u, const Polygon& polygon, std::span<const Point> points) {
    const std::size_t n = points.size();
    std::vector<double> a11(n), a12(n), a22(n), b11(n), b12(n), b22(n), c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Sym2 A = g0_hessian(polygon, points[k]);
        const Sym2 B = u.hessian(points[k]);
        a11[k] = A.xx;
        a12[k] = A.xy;
        a22[k] = A.yy;
        b11[k] = B.xx;
        b12[k] = B.xy;
        b22[k] = B.yy;
    }
    kernels::comparability(a11.data(), a12.data(), a22.data(), b11.data(), b12.data(), b22.data(), n, c.data());
    return reduce_comparability(c, std::vector<Point>(points.begin(), points.end()));
}

RescaledEdge rescale_edge(const ConvexField& u, const Polygon& polygon, std::size_t edge, double t0, double s0,
                          double window, int samples) {
    const ChartFrame f = edge_frame(polygon, edge);
    const double L = polygon.edge_length(edge);
    RescaledEdge out;
    out.base = f.to_world(t0, s0);
    if (!polygon.interior(out.base))
        throw Error(ErrorKind::WindowExceedsDomain, "rescaling base point outside the polygon", edge);
    const NormalizedFrame N = normalize(u, out.base);
    out.D = N(onto_boundary(polygon, f.to_world(t0, 0.0))) / s0;
    out.lambda0 = std::sqrt(s0 * out.D);
    const double reach = out.lambda0 * window;
    if (t0 - reach < 0.0 || t0 + reach > L || !polygon.interior(f.to_world(t0 - reach, s0)) ||
        !polygon.interior(f.to_world(t0 + reach, s0)))
        throw Error(ErrorKind::WindowExceedsDomain, "rescaled window leaves the edge chart", edge);

    const double scale = s0 * out.D;
    const double lambda0 = out.lambda0;
    const Polygon P = polygon;
    out.evaluate = [N, f, P, t0, s0, lambda0, scale](double x1, double x2) {
        return N(onto_boundary(P, f.to_world(t0 + lambda0 * x1, s0 * x2))) / scale;
    };
    out.at_origin = out.evaluate(0.0, 0.0);
    out.at_base = out.evaluate(0.0, 1.0);

    const double dx = 2.0 * window / (samples - 1);
    std::vector<double> xs(samples), fs(samples);
    for (int k = 0; k < samples; ++k) {
        xs[k] = -window + k * dx;
        fs[k] = out.evaluate(xs[k], 0.0);
    }
    const double d = 1e-4 * window;
    out.C = (out.evaluate(d, 0.0) - out.evaluate(-d, 0.0)) / (2 * d);
    out.A = -kInf;
    for (int k = 1; k + 1 < samples; ++k) out.A = std::max(out.A, (fs[k + 1] - 2 * fs[k] + fs[k - 1]) / (dx * dx));
    out.margin_boundary = kInf;
    for (int k = 0; k < samples; ++k)
        out.margin_boundary =
            std::min(out.margin_boundary, 1.0 + out.C * xs[k] + 0.5 * out.A * xs[k] * xs[k] - fs[k]);
    out.margin_normal = kInf;
    for (int k = 0; k < samples; ++k) {
        const double x2 = static_cast<double>(k) / (samples - 1);
        out.margin_normal = std::min(out.margin_normal, 1.0 - out.evaluate(0.0, x2));
    }
    return out;
}

double scaling_F(double zeta) { return zeta * std::log((1.0 + zeta) / (1.0 - zeta)); }

double scaling_F_inverse(double target) {
    if (!(target >= 0.0)) throw Error(ErrorKind::RootNotBracketed, "F takes only non-negative values");
    if (target == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (scaling_F(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

VertexScaling vertex_scaling_lambda(double p1, double p2, double D1, const EdgeTrace& trace) {
    const double L = trace.length();
    if (!(p1 > 0.0) || !(p2 > 0.0) || !(p1 < L))
        throw Error(ErrorKind::RootNotBracketed, "probe point outside the vertex chart", trace.edge());
    const double target = p2 * D1;
    auto integral = [&](double zeta) {
        const double lam = zeta * p1;
        auto f = [&](double s) { return trace.second_derivative(s); };
        return integrate(f, p1 - lam, p1 + lam, 1e-11);
    };
    auto G = [&](double zeta) { return zeta * p1 * integral(zeta) - target; };
    const double zeta_max = std::min(1.0 - 1e-9, (L - p1) / p1);
    if (G(zeta_max) < 0.0)
        throw Error(ErrorKind::RootNotBracketed, "no scaling root inside the edge chart; swap the axes",
                    trace.edge());
    double lo = 0.0;
    double hi = zeta_max;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (G(mid) < 0.0 ? lo : hi) = mid;
    }
    VertexScaling out;
    out.zeta = 0.5 * (lo + hi);
    out.lambda = out.zeta * p1;
    out.ratio = out.lambda / std::sqrt(p1 * p2);
    out.integral = integral(out.zeta);
    return out;
}

namespace {

/// Points on the boundary of {min l >= delta}.
std::vector<Point> inner_boundary(const Polygon& P, double delta, int samples) {
    const std::size_t n = P.size();
    std::vector<Point> corners(n);
    bool valid = true;
    for (std::size_t i = 0; i < n; ++i) {
        // Intersection of l_{i-1} = delta and l_i = delta.
        const std::size_t a = P.prev(i);
        const Vec2 na = P.normal(a);
        const Vec2 nb = P.normal(i);
        const double ca = P.offset(a) + delta;
        const double cb = P.offset(i) + delta;
        const double det = cross(na, nb);
        corners[i] = {(ca * nb.y - cb * na.y) / det, (na.x * cb - nb.x * ca) / det};
        if (P.min_l(corners[i]) < delta - 1e-12) valid = false;
    }
    std::vector<Point> out;
    if (valid) {
        double perimeter = 0.0;
        for (std::size_t i = 0; i < n; ++i) perimeter += norm(corners[P.next(i)] - corners[i]);
        for (std::size_t i = 0; i < n; ++i) {
            const Point a = corners[i];
            const Point b = corners[P.next(i)];
            const int m = std::max(2, static_cast<int>(std::ceil(samples * norm(b - a) / perimeter)));
            for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / m));
        }
        return out;
    }
    const Point c = P.centroid();
    if (P.min_l(c) <= delta) throw Error(ErrorKind::ConfigError, "delta too large for the polygon");
    const double pi = std::acos(-1.0);
    for (int k = 0; k < samples; ++k) {
        const double th = 2 * pi * k / samples;
        const Vec2 d{std::cos(th), std::sin(th)};
        double r = kInf;
        for (std::size_t j = 0; j < n; ++j) {
            const double dl = dot(P.normal(j), d);
            if (dl < 0.0) r = std::min(r, (P.l(j, c) - delta) / -dl);
        }
        out.push_back(c + d * r);
    }
    return out;
}

}  // namespace

ConvexityModulus strict_convexity_modulus(const ConvexField& u, const Polygon& polygon, double delta, int grid,
                                          int boundary_samples) {
    const std::vector<Point> xs = inner_boundary(polygon, delta, boundary_samples);
    std::vector<double> ux(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) ux[k] = u.value(xs[k]);
    const Point lo = polygon.lower_corner();
    const Point hi = polygon.upper_corner();
    ConvexityModulus out;
    out.M = kInf;
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            const Point p{lo.x + (hi.x - lo.x) * i / (grid - 1), lo.y + (hi.y - lo.y) * j / (grid - 1)};
            if (polygon.min_l(p) < 2 * delta - 1e-12) continue;
            const FieldSample s = u.evaluate(p, 1);
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const double gap = ux[k] - s.value - dot(s.grad, xs[k] - p);
                if (gap < out.M) {
                    out.M = gap;
                    out.p = p;
                    out.x = xs[k];
                }
            }
        }
    if (!std::isfinite(out.M)) throw Error(ErrorKind::ConfigError, "no sample points in the inner region");
    return out;
}

namespace {

double hull_area(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return 0.0;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) area += cross(h[i], h[i + 1]);
    return 0.5 * std::abs(area);
}

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

double ma_measure_pl(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& values,
                     const Box& region) {
    const std::size_t nx = xs.size();
    const std::size_t ny = ys.size();
    auto f = [&](std::size_t i, std::size_t j) { return values[j * nx + i]; };
    // Gradients of the lower (T1) and upper (T2) triangle of cell (i, j).
    auto lower = [&](std::size_t i, std::size_t j) {
        const double dx = xs[i + 1] - xs[i];
        const double dy = ys[j + 1] - ys[j];
        return Vec2{(f(i + 1, j) - f(i, j)) / dx, (f(i + 1, j + 1) - f(i + 1, j)) / dy};
    };
    auto upper = [&](std::size_t i, std::size_t j) {
        const double dx = xs[i + 1] - xs[i];
        const double dy = ys[j + 1] - ys[j];
        return Vec2{(f(i + 1, j + 1) - f(i, j + 1)) / dx, (f(i, j + 1) - f(i, j)) / dy};
    };
    double total = 0.0;
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const double x0 = 0.5 * (xs[i - 1] + xs[i]);
            const double x1 = 0.5 * (xs[i] + xs[i + 1]);
            const double y0 = 0.5 * (ys[j - 1] + ys[j]);
            const double y1 = 0.5 * (ys[j] + ys[j + 1]);
            const double share = overlap(x0, x1, region.lo.x, region.hi.x) * overlap(y0, y1, region.lo.y, region.hi.y) /
                                 ((x1 - x0) * (y1 - y0));
            if (share <= 0.0) continue;
            const std::vector<Vec2> g{lower(i - 1, j - 1), upper(i - 1, j - 1), lower(i, j),
                                      upper(i, j),         lower(i - 1, j),     upper(i, j - 1)};
            total += share * hull_area(g);
        }
    return total;
}

double ma_measure_oracle(const ConvexField& u, const Box& region, int n) {
    const double hx = (region.hi.x - region.lo.x) / (n - 3);
    const double hy = (region.hi.y - region.lo.y) / (n - 3);
    std::vector<double> xs(n), ys(n), values(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        xs[k] = region.lo.x + (k - 1) * hx;
        ys[k] = region.lo.y + (k - 1) * hy;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(j) * n + i] = u.value({xs[i], ys[j]});
    return ma_measure_pl(xs, ys, values, region);
}

DiagnosticsReport run_diagnostics(const Solution& sol, const DiagnosticsParams& params) {
    const Polygon& P = sol.polygon();
    const std::size_t n = P.size();
    const double margin = params.vertex_margin_fraction * P.min_edge_length();
    const double gamma = params.gamma < 0.0 ? 0.5 * sol.rhs().alpha() : params.gamma;
    DiagnosticsReport rep;
    rep.sup_D.value = rep.sup_E.value = rep.sup_D1.value = rep.sup_D2.value = -kInf;
    auto keep = [](Located& slot, double value, std::size_t index, Point x, double a, double b) {
        if (value > slot.value) slot = {value, index, x, a, b};
    };

    for (std::size_t e = 0; e < n; ++e) {
        const double L = P.edge_length(e);
        const ChartFrame f = edge_frame(P, e);
        for (int q = 0; q < params.t_points; ++q) {
            const double t = margin + (L - 2 * margin) * q / (params.t_points - 1);
            for (int k = params.kmin; k <= params.kmax; ++k) {
                const double s = std::ldexp(1.0, -k);
                try {
                    keep(rep.sup_D, donaldson_D(sol, P, e, t, s, margin), e, f.to_world(t, s), t, s);
                } catch (const Error& err) {
                    if (err.kind() != ErrorKind::ChartMismatch) throw;
                }
            }
        }
        rep.decay.push_back(decay_check(sol, f, 0.5 * L, gamma, params.kmin, params.kmax));
    }

    for (std::size_t v = 0; v < n; ++v) {
        const ChartFrame f = vertex_frame(P, v);
        const double limit = 0.5 * std::min(P.edge_length(v), P.edge_length(P.prev(v)));
        for (int k = 1; k <= params.kmax; ++k) {
            const double eps = std::ldexp(1.0, -k);
            if (eps >= limit) continue;
            keep(rep.sup_E, donaldson_E(sol, f, eps), v, f.to_world(eps, eps), eps, eps);
        }
        for (int j = 2; j <= params.kmax - 2; ++j) {
            const double big = std::ldexp(1.0, -j);
            for (int m = 0; m <= 6 && j + m <= params.kmax; ++m) {
                const double small = std::ldexp(big, -m);
                try {
                    const DonaldsonPair d1 = donaldson_D1_D2(sol, P, v, big, small);
                    keep(rep.sup_D1, d1.D1, v, f.to_world(big, small), big, small);
                    const DonaldsonPair d2 = donaldson_D1_D2(sol, P, v, small, big);
                    keep(rep.sup_D2, d2.D2, v, f.to_world(small, big), small, big);
                } catch (const Error& err) {
                    if (err.kind() != ErrorKind::ChartMismatch) throw;
                }
            }
        }
    }

    rep.hessian = hessian_comparability(sol);

    const double L0 = P.edge_length(0);
    const double tmid = 0.5 * L0;
    rep.section_eps = params.section_eps;
    rep.section_C_min = kInf;
    for (double eps : params.section_eps) {
        const double c = section_constant(sol, P, 0, tmid, eps);
        rep.section_C.push_back(c);
        rep.section_C_min = std::min(rep.section_C_min, c);
    }

    rep.rescaled = rescale_edge(sol, P, 0, tmid, params.rescale_s0);
    rep.modulus = strict_convexity_modulus(sol, P, params.delta);

    const ChartFrame f0 = edge_frame(P, 0);
    const double dq = 0.2 * L0;
    const Point q{tmid, params.delta};
    if (P.interior(f0.to_world(tmid - dq, q.y)) && P.interior(f0.to_world(tmid + dq, q.y))) {
        rep.delta_value = delta_integral(sol, f0, dq, q);
        rep.delta_quadrature = delta_integral_quadrature(sol, f0, dq, q);
    }

    // Vertex 0 with p1 = 0.1 L, p2 = 0.01 L.
    const double p1 = 0.1 * L0;
    const double p2 = 0.01 * L0;
    try {
        const DonaldsonPair d = donaldson_D1_D2(sol, P, 0, p1, p2);
        rep.scaling = vertex_scaling_lambda(p1, p2, d.D1, sol.boundary().trace(0));
        rep.scaling_ok = true;
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::RootNotBracketed && err.kind() != ErrorKind::ChartMismatch) throw;
    }
    return rep;
}

}  // namespace toricma
