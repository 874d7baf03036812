#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/fixtures.hpp"
#include "toricma/error.hpp"
#include "toricma/reference_potential.hpp"
#include "toricma/weighted_norm.hpp"

using namespace toricma;

namespace {

std::vector<double> uniform(int n) {
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = static_cast<double>(i) / n;
    return x;
}

ScalarField2D sample(const Polygon& P, int n, bool interior_only, const ScalarField2D::Sampler& s) {
    return ScalarField2D::sample(
        uniform(n), uniform(n), [&](Point x) { return interior_only ? P.interior(x) : P.contains(x); }, s);
}

}  // namespace

TEST_CASE("constant field has only the sup part") {
    const Polygon P = fixtures::square();
    const ScalarField2D f = sample(P, 32, false, [](Point, double& v, Vec2& g, Sym2& h) {
        v = 3.0;
        g = {};
        h = {};
    });
    const WeightedNormReport r = weighted_holder_norm(P, f, 0.5);
    CHECK(r.total == doctest::Approx(3.0));
    CHECK(r.c0_alpha == doctest::Approx(3.0));
    CHECK(r.weighted_grad == 0.0);
    CHECK(r.weighted_hess == 0.0);
    CHECK(c1_alpha_norm(f, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("linear field x1 with exponent one half") {
    const Polygon P = fixtures::square();
    const ScalarField2D f = sample(P, 32, false, [](Point x, double& v, Vec2& g, Sym2& h) {
        v = x.x;
        g = {1.0, 0.0};
        h = {};
    });
    const WeightedNormReport band = weighted_holder_norm(P, f, 0.5);
    const WeightedNormReport all = weighted_holder_norm_all_pairs(P, f, 0.5);
    /// sup |x1| = 1 and [x1]_{1/2} = sup |dx|^{1/2} = 1.
    CHECK(band.c0_alpha == doctest::Approx(2.0));
    CHECK(all.c0_alpha == doctest::Approx(2.0));
    /// rho Df = (rho, 0): the sup is rho(centre) = 1/4.
    CHECK(band.sup_grad == doctest::Approx(0.25));
    CHECK(band.weighted_hess == 0.0);
    CHECK(band.semi_grad == doctest::Approx(all.semi_grad).epsilon(1e-12));
    CHECK(band.total == doctest::Approx(band.c0_alpha + band.weighted_grad + band.weighted_hess));
    /// C^{1,1/2}: ||x1||_{C^{0,1/2}} + ||(1, 0)||_{C^{0,1/2}}.
    CHECK(c1_alpha_norm(f, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("band estimator matches pair enumeration for u0") {
    const Polygon P = fixtures::square();
    auto s = [&](Point x, double& v, Vec2& g, Sym2& h) {
        v = u0_eval(P, x);
        g = u0_gradient(P, x);
        h = g0_hessian(P, x);
    };
    const ScalarField2D coarse = sample(P, 24, true, s);
    const ScalarField2D fine = sample(P, 48, true, s);
    const WeightedNormReport band = weighted_holder_norm(P, coarse, 0.5);
    const WeightedNormReport all = weighted_holder_norm_all_pairs(P, coarse, 0.5);
    const WeightedNormReport dense = weighted_holder_norm_all_pairs(P, fine, 0.5);
    CHECK(std::isfinite(band.total));
    CHECK(band.sup_f == doctest::Approx(all.sup_f));
    CHECK(band.sup_grad == doctest::Approx(all.sup_grad));
    CHECK(band.sup_hess == doctest::Approx(all.sup_hess));
    /// The band estimator never exceeds the full enumeration, stays within ten percent of it and
    /// closes the gap as the band widens.
    HolderEstimatorOptions wide;
    wide.band = 12;
    const WeightedNormReport wider = weighted_holder_norm(P, coarse, 0.5, wide);
    CHECK(band.semi_f <= all.semi_f * (1 + 1e-12));
    CHECK(band.semi_hess <= all.semi_hess * (1 + 1e-12));
    CHECK(band.semi_f >= 0.9 * all.semi_f);
    CHECK(band.semi_grad >= 0.9 * all.semi_grad);
    CHECK(band.semi_hess >= 0.9 * all.semi_hess);
    CHECK(wider.semi_f >= band.semi_f);
    CHECK(wider.semi_hess >= band.semi_hess);
    CHECK(wider.semi_f >= 0.99 * all.semi_f);
    CHECK(wider.semi_hess >= 0.99 * all.semi_hess);
    /// Dense re-sampling changes the total by a bounded amount.
    CHECK(std::abs(dense.total - all.total) < 0.25 * dense.total);
    CHECK(band.pairs > 16);
}

TEST_CASE("too few pairs") {
    const Polygon P = fixtures::square();
    ScalarField2D f;
    f.resize({0.0}, {0.0, 1.0});
    CHECK_THROWS_AS(weighted_holder_norm(P, f, 0.5), Error);
    const ScalarField2D g = sample(P, 1, false, [](Point, double& v, Vec2& gr, Sym2& h) {
        v = 1.0;
        gr = {};
        h = {};
    });
    try {
        weighted_holder_norm(P, g, 0.5);
        FAIL("accepted a 2 x 2 grid");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MeshTooCoarse);
    }
}
