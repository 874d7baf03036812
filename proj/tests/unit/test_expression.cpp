#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support/fixtures.hpp"
#include "toricma/error.hpp"
#include "toricma/expression.hpp"

using namespace toricma;

namespace {

double eval(const char* s, Point x = {0.25, 0.5}, const Polygon* P = nullptr) {
    return Expression::parse(s).evaluate(x, P);
}

}  // namespace

TEST_CASE("arithmetic and precedence") {
    CHECK(eval("1 + 2 * 3") == 7.0);
    CHECK(eval("(1 + 2) * 3") == 9.0);
    CHECK(eval("2 ^ 3 ^ 2") == 512.0);
    CHECK(eval("-2 ^ 2") == -4.0);
    CHECK(eval("8 / 4 / 2") == 1.0);
    CHECK(eval("1e-3 * 2") == doctest::Approx(2e-3));
    CHECK(eval("|0.5 - 2|") == 1.5);
    CHECK(eval("abs(-3) + sqrt(16) + max(1, 2) + min(1, 2)") == 10.0);
    CHECK(eval("exp(log(3))") == doctest::Approx(3.0));
    CHECK(eval("pow(2, 10)") == 1024.0);
    CHECK(eval("pi") == doctest::Approx(std::numbers::pi));
    CHECK(eval("e") == doctest::Approx(std::numbers::e));
}

TEST_CASE("coordinates and edge functions") {
    const Polygon P = fixtures::square();
    const Point x{0.25, 0.5};
    CHECK(eval("x1 + 10 * x2", x) == 5.25);
    CHECK(eval("l1", x, &P) == doctest::Approx(0.5));
    CHECK(eval("l2", x, &P) == doctest::Approx(0.75));
    CHECK(eval("l3", x, &P) == doctest::Approx(0.5));
    CHECK(eval("l4", x, &P) == doctest::Approx(0.25));
    CHECK(eval("prod_l", x, &P) == doctest::Approx(0.5 * 0.75 * 0.5 * 0.25));
    CHECK(eval("1 + (x1*x2*(1-x1)*(1-x2))^0.5", x) == doctest::Approx(1.0 + std::sqrt(0.25 * 0.5 * 0.75 * 0.5)));
}

TEST_CASE("smoothness and edge references") {
    CHECK(Expression::parse("1 - prod_l").is_smooth());
    CHECK(Expression::parse("x1^2 + 3").is_smooth());
    CHECK_FALSE(Expression::parse("(x1*x2)^0.5").is_smooth());
    CHECK_FALSE(Expression::parse("|x1 - 0.5|").is_smooth());
    CHECK_FALSE(Expression::parse("sqrt(x1)").is_smooth());
    CHECK(Expression::parse("l3 * l1").max_edge_index() == 3);
    CHECK(Expression::parse("prod_l").uses_edges());
    CHECK_FALSE(Expression::parse("x1").uses_edges());
}

TEST_CASE("rejected input") {
    const char* bad[] = {"", "1 +", "(1", "foo(1)", "x3", "1 2", "|1", "sqrt(1, 2)", "l0"};
    for (const char* s : bad) {
        CAPTURE(s);
        try {
            Expression::parse(s);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ConfigError);
        }
    }
    /// An edge index beyond the polygon fails at evaluation.
    const Polygon T = fixtures::triangle();
    CHECK_THROWS_AS(Expression::parse("l4").evaluate({0.1, 0.1}, &T), Error);
    CHECK_THROWS_AS(Expression::parse("prod_l").evaluate({0.1, 0.1}), Error);
}
