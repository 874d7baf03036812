#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "support/fixtures.hpp"
#include "toricma/boundary_data.hpp"
#include "toricma/diagnostics.hpp"
#include "toricma/error.hpp"
#include "toricma/field.hpp"
#include "toricma/solver.hpp"

using namespace toricma;

namespace {

constexpr double ln2 = std::numbers::ln2;

/// u0 on the unit square is f1(x1) + f1(x2).
double f1(double x) { return (x > 0.0 ? x * std::log(x) : 0.0) + (x < 1.0 ? (1 - x) * std::log(1 - x) : 0.0); }
double g1(double x) { return std::log(x) - std::log(1 - x); }
/// One-dimensional Bregman gap of f1 at y around p.
double bregman(double y, double p) { return f1(y) - f1(p) - g1(p) * (y - p); }

/// Half plane large enough to host the edge model charts used below.
Polygon slab() { return Polygon::from_vertices({{-10, 0}, {10, 0}, {10, 20}, {-10, 20}}); }

}  // namespace

TEST_CASE("model profiles have constant Donaldson quantities") {
    const AnalyticField edge = models::edge_model();
    const AnalyticField corner = models::corner_model();
    const ChartFrame id{};
    for (double t : {-2.0, 0.0, 0.3, 1.7})
        for (double s : {1e-6, 1e-3, 0.1, 0.5, 2.0}) CHECK(std::abs(donaldson_D(edge, id, t, s) - 1.0) < 1e-9);
    for (double e : {1e-6, 1e-3, 0.1, 1.0}) CHECK(std::abs(donaldson_E(corner, id, e) - 4 * ln2) < 1e-9);
    for (double p1 : {1e-4, 0.01, 0.3})
        for (double p2 : {1e-3, 0.2}) {
            const DonaldsonPair d = donaldson_D1_D2(corner, id, p1, p2);
            CHECK(d.D1 == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(d.D2 == doctest::Approx(1.0).epsilon(1e-9));
        }
    for (double delta : {1e-3, 0.1, 0.5})
        CHECK(delta_integral(edge, id, delta, {0.4, 0.7}) == doctest::Approx(2 * delta).epsilon(1e-12));

    /// gamma = 1/4: s^{3/4} D decreases along the whole table.
    const DecayTable table = decay_check(edge, id, 0.0, 0.25);
    CHECK(table.rows.size() == 12);
    CHECK(table.tail_decreasing);
    CHECK(table.last_below_first);
    for (const DecayRow& r : table.rows) {
        CHECK(r.s == std::ldexp(1.0, -r.k));
        CHECK(r.scaled == doctest::Approx(std::pow(r.s, 0.75) * r.D));
    }
}

TEST_CASE("Donaldson quantities of u0 on the square") {
    const Polygon P = fixtures::square();
    const AnalyticField u0 = models::reference(P);
    /// D(1/2, 1/2) on the bottom edge: (-log 2 + 2 log 2) / (1/2).
    CHECK(donaldson_D(u0, P, 0, 0.5, 0.5, 0.1) == doctest::Approx(2 * ln2).epsilon(1e-12));
    CHECK(donaldson_D(u0, P, 0, 0.5, 0.5, 0.1) == doctest::Approx(1.38629436).epsilon(1e-8));
    /// D(t, s) = B(0; s) / s = -log(1 - s) / s on every edge.
    for (std::size_t e = 0; e < 4; ++e)
        for (double s : {1e-4, 0.2, 0.7}) CHECK(donaldson_D(u0, P, e, 0.4, s, 0.1) == doctest::Approx(-std::log1p(-s) / s));
    /// E(eps) = (2 f(2 eps) - 4 f(eps)) / eps tends to 4 log 2.
    const double eps = 1e-3;
    const double E = donaldson_E(u0, P, 0, eps);
    CHECK(E == doctest::Approx((2 * f1(2 * eps) - 4 * f1(eps)) / eps).epsilon(1e-10));
    CHECK(std::abs(E - 4 * ln2) < 0.01 * 4 * ln2);
    /// D1 = B(0; p2) / p2 and D2 = B(0; p1) / p1.
    const DonaldsonPair d = donaldson_D1_D2(u0, P, 0, 0.1, 0.05);
    CHECK(d.D1 == doctest::Approx(bregman(0.0, 0.05) / 0.05).epsilon(1e-10));
    CHECK(d.D2 == doctest::Approx(bregman(0.0, 0.1) / 0.1).epsilon(1e-10));
    try {
        donaldson_D(u0, P, 0, 0.01, 0.5, 0.1);
        FAIL("accepted a point next to a vertex");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ChartMismatch);
    }
}

TEST_CASE("delta integral agrees with quadrature of u_11") {
    const Polygon P = fixtures::square();
    const AnalyticField u0 = models::reference(P, {0.5, 0.25, 1.0});
    const ChartFrame f = edge_frame(P, 0);
    /// u_1 jumps by 2 log(3/2) across [0.4, 0.6] plus 0.5 * 0.2 from the quadratic.
    CHECK(delta_integral(u0, f, 0.1, {0.5, 0.3}) == doctest::Approx(2 * std::log(1.5) + 0.1).epsilon(1e-12));
    for (double q1 : {0.2, 0.5, 0.85})
        for (double delta : {0.01, 0.1}) {
            const double a = delta_integral(u0, f, delta, {q1, 0.3});
            const double b = delta_integral_quadrature(u0, f, delta, {q1, 0.3});
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
        }
}

TEST_CASE("sections of u0") {
    const Polygon P = fixtures::square();
    const AnalyticField u0 = models::reference(P);
    double previous = 1e300;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const SectionExtent s = section_extent(u0, P, 0, 0.5, 0.1, h);
        const double width = (s.t_max - s.t_min) + (s.s_max - s.s_min);
        CHECK(width < previous);
        CHECK(s.t_min < 0.5);
        CHECK(s.t_max > 0.5);
        previous = width;
    }
    /// Minimum over the chord s = eps/2 is attained at t = 1/2: C = B(eps/2; eps) / eps.
    for (double eps : {0.2, 0.05, 0.0125}) {
        const double c = section_constant(u0, P, 0, 0.5, eps);
        CHECK(c == doctest::Approx(bregman(0.5 * eps, eps) / eps).epsilon(1e-7));
        CHECK(section_extent(u0, P, 0, 0.5, eps, 0.5 * c * eps).inclusion);
    }
    /// Limit (1 - log 2)/2 as eps -> 0.
    CHECK(std::abs(section_constant(u0, P, 0, 0.5, 1e-4) - 0.5 * (1 - ln2)) < 1e-3);
}

TEST_CASE("Hessian comparability") {
    const Polygon P = fixtures::square();
    const std::vector<Point> pts{{0.5, 0.5}, {0.01, 0.3}, {0.9, 0.99}, {0.2, 0.7}};
    const Comparability self = hessian_comparability(models::reference(P), P, pts);
    CHECK(self.C == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(self.indefinite);
    /// At the centre D^2 u0 = 4 I: adding diag(4/3, 0) gives eigenvalues 4/3 and 1.
    const std::vector<Point> centre{{0.5, 0.5}};
    const Comparability bumped = hessian_comparability(models::reference(P, {4.0 / 3.0, 0.0, 0.0}), P, centre);
    CHECK(std::abs(bumped.C - 4.0 / 3.0) < 1e-6);
    CHECK(comparability_constant({4, 0, 4}, {2, 0, 4}) == doctest::Approx(2.0));
    CHECK(std::isinf(comparability_constant({1, 0, 1}, {1, 2, 1})));
}

TEST_CASE("rescaled edge model") {
    /// u~(x1, x2) = x1^2/2 + x2 log x2 - x2 + 1 for every s0.
    const Polygon P = slab();
    const AnalyticField edge = models::edge_model();
    for (double s0 : {0.05, 0.01}) {
        const RescaledEdge r = rescale_edge(edge, P, 0, 10.0, s0);
        CHECK(r.D == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.lambda0 == doctest::Approx(std::sqrt(s0)).epsilon(1e-10));
        CHECK(r.at_origin == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(r.at_base) < 1e-10);
        CHECK(std::abs(r.C) < 1e-8);
        CHECK(r.A == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(r.margin_boundary) < 1e-8);
        CHECK(std::abs(r.margin_normal) < 1e-10);
        CHECK(r.evaluate(0.5, 0.5) == doctest::Approx(0.125 + 0.5 * std::log(0.5) + 0.5).epsilon(1e-10));
    }
    const Polygon S = fixtures::square();
    CHECK_THROWS_AS(rescale_edge(models::reference(S), S, 0, 0.01, 0.5), Error);
}

TEST_CASE("vertex scaling") {
    CHECK(scaling_F_inverse(0.5 * std::log(3.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(scaling_F_inverse(0.0) == 0.0);
    for (double z : {0.1, 0.4, 0.9}) CHECK(scaling_F_inverse(scaling_F(z)) == doctest::Approx(z).epsilon(1e-12));
    /// Trace t log t + (1-t) log(1-t): as p1 = p2 -> 0 the ratio tends to F^{-1}(D1 p2 / p1).
    const EdgeTrace tr = solve_edge_ode([](double) { return 1.0; }, 1.0, 0.0, 0.0);
    const double limit = scaling_F_inverse(1.0);
    for (int k : {4, 7, 10}) {
        const double p = std::ldexp(1.0, -k);
        const VertexScaling v = vertex_scaling_lambda(p, p, 1.0, tr);
        CHECK(v.ratio > 0.0);
        CHECK(v.ratio < 1.0);
        CHECK(v.lambda * v.integral == doctest::Approx(p).epsilon(1e-8));
        CHECK(std::abs(v.ratio - limit) < 4 * p);
    }
    CHECK_THROWS_AS(vertex_scaling_lambda(0.01, 10.0, 1.0, tr), Error);
}

TEST_CASE("strict convexity modulus and Monge-Ampere measure") {
    const Polygon P = fixtures::square();
    const AnalyticField u0 = models::reference(P);
    /// Separable: the infimum is the one-dimensional gap from p = 0.4 out to x = 0.2.
    const ConvexityModulus m = strict_convexity_modulus(u0, P, 0.2);
    CHECK(m.M == doctest::Approx(bregman(0.2, 0.4)).epsilon(1e-3));
    CHECK(m.M == doctest::Approx(0.091516).epsilon(1e-3));

    /// mu(Q) = int_Q 1 / prod l = (2 log 3)^2 on [1/4, 3/4]^2.
    const Box q{{0.25, 0.25}, {0.75, 0.75}};
    const double exact = 4 * std::log(3.0) * std::log(3.0);
    CHECK(std::abs(ma_measure_oracle(u0, q) - exact) < 0.02 * exact);
    const AnalyticField affine([](Point x) { return 1 + 2 * x.x - x.y; }, [](Point) { return Vec2{2, -1}; },
                               [](Point) { return Sym2{}; }, [](Point x, double s) { return x.x >= -s && x.x <= 1 + s; });
    CHECK(std::abs(ma_measure_oracle(affine, q)) < 1e-12);
    /// Quadratic |x|^2/2 has measure equal to area.
    const AnalyticField half = models::reference(P, {1, 0, 1});
    const double with_quad = ma_measure_oracle(half, q);
    CHECK(with_quad > ma_measure_oracle(u0, q));
}

TEST_CASE("Donaldson quantities ignore affine shifts") {
    const Polygon P = fixtures::square();
    const AnalyticField u = models::reference(P, {0.3, 0.1, 0.2});
    const AnalyticField w = u.plus_affine(-0.7, {1.5, -2.5});
    CHECK(donaldson_D(w, P, 1, 0.3, 0.2, 0.1) == doctest::Approx(donaldson_D(u, P, 1, 0.3, 0.2, 0.1)).epsilon(1e-12));
    CHECK(donaldson_E(w, P, 2, 0.01) == doctest::Approx(donaldson_E(u, P, 2, 0.01)).epsilon(1e-12));
    const DonaldsonPair a = donaldson_D1_D2(u, P, 3, 0.2, 0.1);
    const DonaldsonPair b = donaldson_D1_D2(w, P, 3, 0.2, 0.1);
    CHECK(b.D1 == doctest::Approx(a.D1).epsilon(1e-12));
    CHECK(b.D2 == doctest::Approx(a.D2).epsilon(1e-12));
}

TEST_CASE("diagnostics of a discrete solution") {
    const Polygon P = fixtures::square();
    const Solution s = solve(P, RhsField::constant(1.0), fixtures::zeros(4), {6, 1.0, 0.25});
    const DiagnosticsReport r = run_diagnostics(s);
    /// v = 0: the solution is u0 and every quantity is that of u0.
    CHECK(r.hessian.C == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::isfinite(r.sup_D.value));
    CHECK(std::isfinite(r.sup_E.value));
    const double e = r.sup_E.a;
    CHECK(r.sup_E.value == doctest::Approx((2 * f1(2 * e) - 4 * f1(e)) / e).epsilon(1e-6));
    CHECK(r.modulus.M > 0.0);
    CHECK(r.decay.size() == 4);
    for (const DecayTable& t : r.decay) CHECK(t.tail_decreasing);
    CHECK(r.section_C_min > 0.0);
    CHECK(r.delta_value == doctest::Approx(r.delta_quadrature).epsilon(1e-6));
    const Comparability c = hessian_comparability(s);
    CHECK(c.C == doctest::Approx(1.0).epsilon(1e-6));
}
