#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>

#include "support/fixtures.hpp"
#include "toricma/error.hpp"
#include "toricma/kernels.hpp"
#include "toricma/reference_potential.hpp"
#include "toricma/solver.hpp"

using namespace toricma;

namespace {

/// Sup over interior nodes of |v - f|.
template <class F>
double sup_diff(const Solution& s, F f) {
    double e = 0.0;
    for (std::size_t k = 0; k < s.mesh().unknowns(); ++k) {
        const auto [i, j] = s.mesh().interior_ij(k);
        e = std::max(e, std::abs(s.node_v(i, j) - f(s.mesh().interior_point(k))));
    }
    return e;
}

/// v at every slot of a mesh from a closed form.
template <class F>
std::vector<double> slots_of(const Mesh& m, F f) {
    std::vector<double> v(m.slots());
    for (std::size_t s = 0; s < m.slots(); ++s) v[s] = f(m.slot_point(s));
    return v;
}

}  // namespace

TEST_CASE("discrete operator on closed forms") {
    const Polygon P = fixtures::square();
    const Mesh m = Mesh::build(P, {5, 1.0, 0.25});
    const ResidualField zero = discrete_operator(m, RhsField::constant(1.0), slots_of(m, [](Point) { return 0.0; }));
    CHECK(zero.sup < 1e-13);
    CHECK(zero.spd);
    const ResidualField bilinear =
        discrete_operator(m, fixtures::x1x2_rhs(P), slots_of(m, [](Point x) { return x.x * x.y; }));
    CHECK(bilinear.sup < 1e-13);

    /// v = 0.1 (x1^2 - x1): at the centre prod l det(diag(4.2, 4)) - 1 = 16.8/16 - 1.
    const ResidualField quad =
        discrete_operator(m, RhsField::constant(1.0), slots_of(m, [](Point x) { return 0.1 * (x.x * x.x - x.x); }));
    const auto centre = m.slot_of(16, 16);
    REQUIRE(centre >= 0);
    CHECK(quad.residual[centre] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(quad.sup > 0.0);

    /// Indefinite Hessians are reported, not rejected.
    const ResidualField bad =
        discrete_operator(m, RhsField::constant(1.0), slots_of(m, [](Point x) { return -10.0 * x.x * x.x; }));
    CHECK_FALSE(bad.spd);
    CHECK(bad.min_eigenvalue < 0.0);
}

TEST_CASE("exact recovery for H = 1 and for u0 + x1 x2") {
    const Polygon P = fixtures::square();
    const auto t0 = std::chrono::steady_clock::now();
    const Solution one = solve(P, RhsField::constant(1.0), fixtures::zeros(4), {7, 1.0, 0.25});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(one.converged);
    CHECK(sup_diff(one, [](Point) { return 0.0; }) <= 1e-8);
    CHECK(seconds <= 30.0);

    const Solution bil = solve(P, fixtures::x1x2_rhs(P), std::vector<double>{0, 0, 1, 0}, {7, 1.0, 0.25});
    CHECK(sup_diff(bil, [](Point x) { return x.x * x.y; }) <= 1e-8);

    const FieldSample c1 = one.evaluate({0.5, 0.5}, 2);
    CHECK(c1.value == doctest::Approx(-2 * std::log(2.0)).epsilon(1e-12));
    CHECK(c1.hess.xx == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(c1.hess.yy == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(std::abs(c1.hess.xy) < 1e-9);
    const FieldSample c2 = bil.evaluate({0.5, 0.5}, 2);
    CHECK(c2.hess.xx == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(c2.hess.xy == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c2.hess.yy == doctest::Approx(4.0).epsilon(1e-9));

    /// Near an edge the gradient follows the analytic u0 part.
    const Point near{0.5, 1e-3};
    const Vec2 g = one.gradient(near);
    CHECK(g.y == doctest::Approx(u0_gradient(P, near).y).epsilon(1e-9));
    CHECK(g.y == doctest::Approx(std::log(1e-3) - std::log(1 - 1e-3)).epsilon(1e-9));
}

TEST_CASE("Holder right-hand side: certificates, symmetry and self-convergence") {
    const Polygon P = fixtures::square();
    const RhsField H = fixtures::holder_rhs(P);
    const Solution s6 = solve(P, H, fixtures::zeros(4), {6, 1.0, 0.25});
    const Solution s7 = solve(P, H, fixtures::zeros(4), {7, 1.0, 0.25});
    const Solution s8 = solve(P, H, fixtures::zeros(4), {8, 1.0, 0.25});
    for (const Solution* s : {&s6, &s7, &s8}) {
        CHECK(s->converged);
        const ResidualField r = discrete_operator(s->mesh(), H, s->slot_values());
        CHECK(r.sup <= SolverParams{}.tol);
        CHECK(r.min_eigenvalue > 0.0);
        CHECK(s->min_eigenvalue > 0.0);
    }
    /// H and the vertex values are invariant under x1 <-> x2, so is v.
    double asym = 0.0;
    const Mesh& m = s7.mesh();
    for (std::size_t k = 0; k < m.unknowns(); ++k) {
        const auto [i, j] = m.interior_ij(k);
        if (!s7.has_node_data(j, i)) continue;
        asym = std::max(asym, std::abs(s7.node_v(i, j) - s7.node_v(j, i)));
    }
    CHECK(asym <= 1e-10);

    /// Sup differences on the level-6 nodes shrink with at least first order.
    const Mesh& c = s6.mesh();
    double e67 = 0.0;
    double e78 = 0.0;
    for (std::size_t k = 0; k < c.unknowns(); ++k) {
        const Point x = c.interior_point(k);
        const double a = s6.value(x);
        const double b = s7.value(x);
        const double d = s8.value(x);
        e67 = std::max(e67, std::abs(a - b));
        e78 = std::max(e78, std::abs(b - d));
    }
    CHECK(e78 < e67);
    CHECK(std::log2(e67 / e78) >= 1.0);
}

TEST_CASE("affine vertex data shift v by the affine function") {
    const Polygon P = fixtures::square();
    const RhsField H = fixtures::holder_rhs(P);
    auto phi = [](Point x) { return 0.25 - 0.5 * x.x + 0.75 * x.y; };
    std::vector<double> a;
    for (Point v : P.vertices()) a.push_back(phi(v));
    const Solution base = solve(P, H, fixtures::zeros(4), {5, 1.0, 0.25});
    const Solution moved = solve(P, H, a, {5, 1.0, 0.25});
    double e = 0.0;
    for (std::size_t k = 0; k < base.mesh().unknowns(); ++k) {
        const auto [i, j] = base.mesh().interior_ij(k);
        e = std::max(e, std::abs(moved.node_v(i, j) - base.node_v(i, j) - phi(base.mesh().interior_point(k))));
    }
    CHECK(e < 1e-9);
}

TEST_CASE("normal derivative grows like the log of the distance") {
    const Polygon P = fixtures::square();
    const Solution s = solve(P, RhsField::constant(1.0), fixtures::zeros(4), {7, 1.0, 0.25});
    const double d1 = 1e-3;
    const double d2 = 1e-5;
    const double slope = (s.gradient({0.5, d1}).y - s.gradient({0.5, d2}).y) / (std::log(d1) - std::log(d2));
    CHECK(slope > 1.0 / 1.5);
    CHECK(slope < 1.5);
}

TEST_CASE("vector kernels give the same solution bit for bit") {
    using namespace toricma::kernels;
    const Polygon P = fixtures::square();
    const RhsField H = fixtures::holder_rhs(P);
    set_isa(Isa::Scalar);
    const Solution a = solve(P, H, fixtures::zeros(4), {5, 1.0, 0.25});
    set_isa(detected_isa());
    const Solution b = solve(P, H, fixtures::zeros(4), {5, 1.0, 0.25});
    REQUIRE(a.slot_values().size() == b.slot_values().size());
    CHECK(std::memcmp(a.slot_values().data(), b.slot_values().data(), a.slot_values().size() * sizeof(double)) == 0);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("solver errors") {
    const Polygon P = fixtures::square();
    try {
        solve(P, RhsField::constant(2.0), fixtures::zeros(4), {5, 1.0, 0.25});
        FAIL("accepted an incompatible H");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IncompatibleH);
    }
    SolverParams one_step;
    one_step.max_iter = 1;
    one_step.tol = 1e-14;
    try {
        solve(P, fixtures::holder_rhs(P), fixtures::zeros(4), {5, 1.0, 0.25}, one_step);
        FAIL("converged in one step");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NewtonStalled);
    }
    CHECK_THROWS_AS(RhsField([](Point) { return 0.0; }, 0.0, 1.0, 0.5), Error);
    /// 1 on the boundary, -1/4 at the centre.
    const RhsField lying([P](Point x) { return 1.0 - 20.0 * P.product_l(x); }, 1.0, 1.0, 0.5);
    try {
        solve(P, lying, fixtures::zeros(4), {5, 1.0, 0.25});
        FAIL("accepted a negative H");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPositiveH);
    }
}
