#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "support/fixtures.hpp"
#include "toricma/boundary_data.hpp"
#include "toricma/error.hpp"
#include "toricma/reference_potential.hpp"

using namespace toricma;

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// det(D^2 u0) prod l = sum_{i<j} det(n_i, n_j)^2 prod_{k != i, j} l_k: compatible on every polygon,
/// since u0 solves it.
RhsField reference_rhs(const Polygon& P) {
    auto H = [P](Point x) {
        double s = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i)
            for (std::size_t j = i + 1; j < P.size(); ++j) {
                const double c = cross(P.normal(i), P.normal(j));
                s += c * c * P.product_l_except(x, i, j);
            }
        return s;
    };
    return RhsField(H, 0.1, 10.0, 0.5, 0.0, true);
}

}  // namespace

TEST_CASE("edge ODE closed forms") {
    const EdgeTrace one = solve_edge_ode([](double) { return 1.0; }, 1.0, 0.0, 0.0);
    CHECK(std::abs(one.value(0.5) + std::numbers::ln2) < 1e-9);
    for (double t : {1e-6, 0.01, 0.3, 0.77, 1 - 1e-6}) CHECK(std::abs(one.value(t) - xlogx(t) - xlogx(1 - t)) < 1e-12);
    CHECK(one.h0() == 1.0);
    CHECK(one.hL() == 1.0);

    const EdgeTrace quad = solve_edge_ode([](double t) { return t * (1 - t); }, 1.0, 0.0, 0.0);
    for (double t : {0.1, 0.25, 0.5, 0.9}) CHECK(std::abs(quad.value(t) - (t * t / 2 - t / 2)) < 1e-12);
    CHECK(quad.derivative(0.25) == doctest::Approx(-0.25).epsilon(1e-10));

    /// h = 1 + t^{1/2}(1 - t): u = t log t + (1-t) log(1-t) + 4/3 (t^{3/2} - t).
    const EdgeTrace holder = solve_edge_ode([](double t) { return 1.0 + std::sqrt(t) * (1 - t); }, 1.0, 0.0, 0.0);
    CHECK(std::abs(holder.value(0.5) - (-0.8884093264355802)) < 1e-9);
    for (double t : {1e-4, 0.2, 0.6, 0.95}) {
        const double exact = xlogx(t) + xlogx(1 - t) + 4.0 / 3.0 * (std::pow(t, 1.5) - t);
        CHECK(std::abs(holder.value(t) - exact) < 1e-9);
    }
}

TEST_CASE("edge trace invariants") {
    auto h = [](double t) { return 0.6 + 0.3 * std::sqrt(t / 2.0) + 0.1 * t * t; };
    const double L = 2.0;
    const EdgeTrace tr = solve_edge_ode(h, L, 0.3, -0.7);
    CHECK(tr.value(0.0) == 0.3);
    CHECK(tr.value(L) == -0.7);
    CHECK(tr.u().front() == 0.3);
    CHECK(tr.u().back() == -0.7);
    /// Convex along the edge.
    for (std::size_t k = 1; k + 1 < tr.t().size(); ++k) {
        const double a = tr.t()[k - 1];
        const double b = tr.t()[k];
        const double c = tr.t()[k + 1];
        const double slope = (tr.u()[k + 1] - tr.u()[k]) / (c - b) - (tr.u()[k] - tr.u()[k - 1]) / (b - a);
        CHECK(slope > -1e-10);
    }
    /// u_tt t (L - t) recovers h(0) as t -> 0 at three dyadic scales.
    double prev_err = 1e300;
    for (int k : {8, 12, 16}) {
        const double t = std::ldexp(1.0, -k);
        const double d = t * 1e-3;
        const double second = (tr.value(t + d) - 2 * tr.value(t) + tr.value(t - d)) / (d * d);
        const double err = std::abs(second * t * (L - t) - tr.h0());
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-2);
    /// u_tt = h / (t (L - t)) at interior points.
    for (double t : {0.3, 1.0, 1.7}) {
        const double d = 1e-4;
        const double second = (tr.value(t + d) - 2 * tr.value(t) + tr.value(t - d)) / (d * d);
        CHECK(second == doctest::Approx(tr.second_derivative(t)).epsilon(1e-5));
    }
}

TEST_CASE("affine endpoint shifts move the trace by the chord") {
    auto h = [](double t) { return 1.0 + std::sqrt(t) * (1 - t); };
    const EdgeTrace a = solve_edge_ode(h, 1.0, 0.0, 0.0);
    const EdgeTrace b = solve_edge_ode(h, 1.0, 0.25, -1.5);
    for (double t : {0.0, 1e-5, 0.3, 0.5, 0.8, 1.0}) CHECK(b.value(t) - a.value(t) == doctest::Approx(0.25 - 1.75 * t));
}

TEST_CASE("restriction of H to an edge") {
    const Polygon S = fixtures::square();
    const EdgeProfile bottom = edge_h_from_H(S, RhsField::constant(1.0), 0);
    for (double t : {0.0, 1e-9, 0.4, 1.0}) CHECK(bottom.h(t) == doctest::Approx(1.0));
    const RhsField bump = fixtures::expr_rhs(S, "1 - x1*(1-x1)*x2*(1-x2)", 15.0 / 16.0, 1.0, 0.5, true);
    const EdgeProfile right = edge_h_from_H(S, bump, 1);
    for (double t : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(right.h(t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(right.c_prev == doctest::Approx(1.0));
    CHECK(right.c_next == doctest::Approx(1.0));

    /// Triangle hypotenuse: h(0) = L n_0.T_1 = 1 and h(L) = -L n_2.T_1 = 1.
    const Polygon T = fixtures::triangle();
    const EdgeProfile hyp = edge_h_from_H(T, reference_rhs(T), 1);
    CHECK(hyp.length == doctest::Approx(std::numbers::sqrt2));
    CHECK(hyp.h0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hyp.hL == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hyp.h(1e-7) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(hyp.h(hyp.length - 1e-7) == doctest::Approx(1.0).epsilon(1e-5));
    for (double t : {0.2, 0.7, 1.3}) CHECK(hyp.h(t) > 0.0);

    try {
        edge_h_from_H(S, RhsField::constant(2.0), 2);
        FAIL("accepted an incompatible H");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IncompatibleH);
        CHECK(e.index() == 2);
    }
    CHECK_THROWS_AS(solve_edge_ode([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 1.0, 0, 0), Error);
}

TEST_CASE("assembled Dirichlet data") {
    const Polygon S = fixtures::square();
    const BoundaryData one = BoundaryData::assemble(S, RhsField::constant(1.0), fixtures::zeros(4));
    const BoundaryData x1x2 = BoundaryData::assemble(S, fixtures::x1x2_rhs(S), std::vector<double>{0, 0, 1, 0});
    const BoundaryData holder = BoundaryData::assemble(S, fixtures::holder_rhs(S), fixtures::zeros(4));
    for (std::size_t e = 0; e < 4; ++e)
        for (double t : {0.0, 1e-6, 0.125, 0.5, 0.875, 1.0}) {
            const Point x = S.edge_point(e, t);
            CHECK(std::abs(one.v_trace(e, t)) < 1e-12);
            CHECK(std::abs(x1x2.v_trace(e, t) - x.x * x.y) < 1e-12);
            /// H is 1 on the whole boundary, so every trace is t log t + (1-t) log(1-t).
            CHECK(std::abs(holder.u_trace(e, t) - xlogx(t) - xlogx(1 - t)) < 1e-12);
            CHECK(std::abs(x1x2.u_at(x) - u0_eval(S, x) - x.x * x.y) < 1e-12);
        }
    /// Adjacent traces meet at the shared vertex.
    const std::vector<double> a{0.5, -0.25, 1.0, 0.0};
    const BoundaryData d = BoundaryData::assemble(S, fixtures::holder_rhs(S), a);
    for (std::size_t e = 0; e < 4; ++e) {
        const double end = d.u_trace(e, 1.0);
        const double start = d.u_trace((e + 1) % 4, 0.0);
        CHECK(std::abs(end - start) < 1e-12);
        CHECK(end == a[(e + 1) % 4]);
        CHECK(std::abs(d.v_trace(e, 1.0) - d.v_trace((e + 1) % 4, 0.0)) < 1e-12);
    }
}

TEST_CASE("v trace is continuously differentiable along a non-square edge") {
    const Polygon T = fixtures::triangle();
    std::vector<double> a;
    for (Point v : T.vertices()) a.push_back(u0_eval(T, v));
    const BoundaryData d = BoundaryData::assemble(T, reference_rhs(T), a);
    /// H = det(D^2 u0) prod l with vertex values u0(v_i): u = u0, so v vanishes on the boundary.
    for (std::size_t e = 0; e < 3; ++e)
        for (double s : {0.0, 1e-8, 0.3, 0.5, 0.99, 1.0}) {
            const double t = s * T.edge_length(e);
            CHECK(std::abs(d.v_trace(e, t)) < 1e-9);
            if (s > 0.0 && s < 1.0) CHECK(std::abs(d.v_trace_derivative(e, t)) < 1e-7);
        }
}
