#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/fixtures.hpp"
#include "toricma/error.hpp"
#include "toricma/reference_potential.hpp"

using namespace toricma;

TEST_CASE("u0 closed values on the square") {
    const Polygon P = fixtures::square();
    CHECK(u0_eval(P, {0.5, 0.5}) == doctest::Approx(-2.0 * std::numbers::ln2).epsilon(1e-15));
    CHECK(u0_eval(P, {0.0, 0.0}) == 0.0);
    CHECK(u0_eval(P, {0.25, 0.5}) == doctest::Approx(-1.2554823251787535).epsilon(1e-14));
    CHECK_THROWS_AS(u0_eval(P, {-0.1, 0.5}), Error);
    /// u0 <= 0 wherever every l_i <= 1.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < 200; ++k) CHECK(u0_eval(P, {unif(rng), unif(rng)}) <= 0.0);
}

TEST_CASE("metric on the square and the triangle") {
    const Polygon S = fixtures::square();
    const Sym2 c = g0_hessian(S, {0.5, 0.5});
    CHECK(c.xx == doctest::Approx(4.0));
    CHECK(c.yy == doctest::Approx(4.0));
    CHECK(c.xy == doctest::Approx(0.0));
    const Sym2 e = g0_hessian(S, {0.5, 0.01});
    CHECK(e.xx == doctest::Approx(4.0));
    CHECK(e.yy == doctest::Approx(101.01010101010101).epsilon(1e-14));
    CHECK_THROWS_AS(g0_hessian(S, {0.5, 0.0}), Error);

    /// Centroid of the triangle: 3 e2 e2^T + 3 e1 e1^T + 3 sqrt2 (1,1)(1,1)^T / 2.
    const Sym2 t = g0_hessian(fixtures::triangle(), {1.0 / 3.0, 1.0 / 3.0});
    CHECK(t.xx == doctest::Approx(5.1213203435596424).epsilon(1e-14));
    CHECK(t.yy == doctest::Approx(5.1213203435596424).epsilon(1e-14));
    CHECK(t.xy == doctest::Approx(2.1213203435596424).epsilon(1e-14));
}

TEST_CASE("metric is the Hessian of u0 and the gradient its gradient") {
    const Polygon P = Polygon::from_vertices({{0, 0}, {2, 0}, {3, 1}, {1.5, 2.5}, {-0.5, 1}});
    const double h = 1e-4;
    const Point probes[] = {{1.0, 1.0}, {0.2, 0.3}, {2.5, 0.9}, {1.4, 2.2}};
    for (Point x : probes) {
        auto u = [&](double dx, double dy) { return u0_eval(P, x + Vec2{dx, dy}); };
        const Sym2 H = g0_hessian(P, x);
        const Vec2 g = u0_gradient(P, x);
        const double scale = std::max(1.0, H.max_eigenvalue());
        CHECK(std::abs((u(h, 0) - 2 * u(0, 0) + u(-h, 0)) / (h * h) - H.xx) < 1e-5 * scale);
        CHECK(std::abs((u(0, h) - 2 * u(0, 0) + u(0, -h)) / (h * h) - H.yy) < 1e-5 * scale);
        CHECK(std::abs((u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4 * h * h) - H.xy) < 1e-5 * scale);
        CHECK(g.x == doctest::Approx((u(h, 0) - u(-h, 0)) / (2 * h)).epsilon(1e-7));
        CHECK(g.y == doctest::Approx((u(0, h) - u(0, -h)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("det of the metric times prod l is bounded away from zero and infinity") {
    const Polygon P = fixtures::square();
    double lo = 1e300;
    double hi = 0.0;
    for (int j = 1; j < 200; ++j)
        for (int i = 1; i < 200; ++i) {
            const Point x{i / 200.0, j / 200.0};
            const double q = g0_hessian(P, x).det() * P.product_l(x);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
    /// On the square the product is identically 1.
    CHECK(lo == doctest::Approx(1.0));
    CHECK(hi == doctest::Approx(1.0));

    const Polygon T = fixtures::triangle();
    lo = 1e300;
    hi = 0.0;
    for (int j = 1; j < 200; ++j)
        for (int i = 1; i + j < 200; ++i) {
            const Point x{i / 200.0, j / 200.0};
            const double q = g0_hessian(T, x).det() * T.product_l(x);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
    CHECK(lo > 0.1);
    CHECK(hi < 10.0);
}

TEST_CASE("chart distances") {
    const Polygon P = fixtures::square();
    CHECK(g0_distance(P, {0.3, 0.01}, {0.3, 0.04}) == doctest::Approx(0.1));
    CHECK(g0_distance(P, {0.01, 0.04}, {0.04, 0.01}) == doctest::Approx(0.2));
    CHECK(g0_distance(P, {0.4, 0.6}, {0.4, 0.6}) == 0.0);
    CHECK(g0_distance(P, {0.4, 0.6}, {0.5, 0.6}) == doctest::Approx(0.1));
    CHECK(classify_chart(P, {0.01, 0.04}, 0.25) == Chart{ChartKind::Vertex, 0});
    CHECK(classify_chart(P, {0.3, 0.01}, 0.25) == Chart{ChartKind::Edge, 0});
    CHECK(classify_chart(P, {0.5, 0.5}, 0.25) == Chart{ChartKind::Bulk, 0});
    CHECK_THROWS_AS(g0_distance(P, {0.3, 0.01}, {0.5, 0.5}), Error);
}

TEST_CASE("chart distance bounds on random pairs") {
    const Polygon P = fixtures::square();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double lower = 1e300;
    double upper = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Point p{unif(rng), unif(rng)};
        const Point q{unif(rng), unif(rng)};
        const double d = g0_distance_path(P, p, q);
        const double e = norm(p - q);
        CHECK(d == doctest::Approx(g0_distance_path(P, q, p)));
        CHECK(d >= 0.0);
        lower = std::min(lower, d / e);
        upper = std::max(upper, d / std::sqrt(e));
    }
    CHECK(lower > 0.0);
    CHECK(std::isfinite(upper));
    /// The metric length of a segment dominates a constant multiple of its Euclidean length.
    CHECK(g0_segment_length(P, {0.5, 0.25}, {0.5, 0.75}) > 0.5 * 2.0);
}
