#include "spde/expression.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace spde;

TEST_SUITE("expression") {

TEST_CASE("arithmetic and precedence") {
    const std::vector<double> x{0.25, 2.0};
    CHECK(Expression::parse("1 + 2*3")(0.0, x) == 7.0);
    CHECK(Expression::parse("(1 + 2)*3")(0.0, x) == 9.0);
    CHECK(Expression::parse("2^3^2")(0.0, x) == doctest::Approx(512.0));
    CHECK(Expression::parse("-2^2")(0.0, x) == -4.0);
    CHECK(Expression::parse("8/4/2")(0.0, x) == 1.0);
    CHECK(Expression::parse("1e-3 * 2.5E2")(0.0, x) == doctest::Approx(0.25));
}

TEST_CASE("names and functions") {
    const std::vector<double> x{0.25, 2.0};
    CHECK(Expression::parse("sin(2*pi*x)")(0.0, x) == doctest::Approx(1.0));
    CHECK(Expression::parse("x1 + x2*t")(3.0, x) == doctest::Approx(6.25));
    CHECK(Expression::parse("exp(t) * cos(0)")(1.0, x) == doctest::Approx(std::numbers::e));
    const auto e = Expression::parse("x2 * sin(t)");
    CHECK(e.depends_on_x());
    CHECK(e.depends_on_t());
    CHECK(e.max_axis() == 2);
    const auto c = Expression::parse("2*pi");
    CHECK_FALSE(c.depends_on_x());
    CHECK_FALSE(c.depends_on_t());
    CHECK(c.max_axis() == 0);
    CHECK(Expression::constant(0.5)(7.0, x) == 0.5);
}

TEST_CASE("malformed input is rejected") {
    for (const char* bad : {"", "1 +", "sin(", "foo", "x0", "(1", "1 2", "tan(x)", "3 * * 2"})
        CHECK_THROWS_AS(Expression::parse(bad), ExpressionError);
}

}
