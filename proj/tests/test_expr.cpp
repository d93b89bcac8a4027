#include "doctest.h"
#include "oracles.hpp"

#include "spraylab/expr.hpp"

#include <cmath>

using namespace spraylab;

namespace {

Point pt(std::vector<double> xs, std::vector<double> ys) { return Point{std::move(xs), std::move(ys)}; }

} // namespace

TEST_CASE("parse builds a left-leaning binary tree")
{
    const Expression e = parse("2*y1*y2", 2);
    REQUIRE(e.kind() == NodeKind::binary);
    CHECK(e.binary_op() == BinaryOp::mul);
    CHECK(e.rhs() == y(2));
    REQUIRE(e.lhs().kind() == NodeKind::binary);
    CHECK(e.lhs().binary_op() == BinaryOp::mul);
    CHECK(e.lhs().lhs().is_constant(2.0));
    CHECK(e.lhs().rhs() == y(1));
}

TEST_CASE("parse accepts the Anderson-Thompson coefficient")
{
    const Expression g1 = parse("(y1^2+y2^2)/2", 2);
    CHECK(eval(g1, pt({0, 0}, {1, 3})) == doctest::Approx(5.0));
    CHECK(to_string(g1) == "(y1^2 + y2^2)/2");
}

TEST_CASE("parse errors")
{
    SUBCASE("index out of range")
    {
        try {
            (void)parse("y3", 2);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.offset() == 0);
            CHECK(std::string(err.what()).find("out of range") != std::string::npos);
        }
    }
    SUBCASE("syntax error carries the byte offset")
    {
        try {
            (void)parse("y1 + * y2", 2);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.offset() == 5);
        }
    }
    SUBCASE("non-integer exponent")
    {
        CHECK_THROWS_WITH_AS((void)parse("y1^0.5", 1), doctest::Contains("non-integer"), ParseError);
        CHECK_THROWS_WITH_AS((void)parse("y1^(1/2)", 1), doctest::Contains("non-integer"), ParseError);
    }
    CHECK_THROWS_AS((void)parse("z1", 2), ParseError);
    CHECK_THROWS_AS((void)parse("y0", 2), ParseError);
    CHECK_THROWS_AS((void)parse("sqrt(y1", 2), ParseError);
    CHECK_THROWS_AS((void)parse("", 2), ParseError);
    CHECK_THROWS_AS((void)parse("y1 y2", 2), ParseError);
}

TEST_CASE("parse details: unary minus, signed exponents, scientific literals")
{
    const Point p = pt({0.3, -0.2}, {1.5, -0.5});
    CHECK(eval(parse("-y1^2", 2), p) == doctest::Approx(-2.25));
    CHECK(eval(parse("(-y1)^2", 2), p) == doctest::Approx(2.25));
    CHECK(eval(parse("y1^-2", 2), p) == doctest::Approx(1.0 / 2.25));
    CHECK(eval(parse("y1^(-2)", 2), p) == doctest::Approx(1.0 / 2.25));
    CHECK(eval(parse("2.5e-1 * x1", 2), p) == doctest::Approx(0.075));
    CHECK(eval(parse("  x1*-y2 ", 2), p) == doctest::Approx(0.15));
    CHECK(eval(parse("x1 - -x2", 2), p) == doctest::Approx(0.1));
}

TEST_CASE("diff examples")
{
    const Expression g1 = parse("(y1^2+y2^2)/2", 2);
    CHECK(simplify(diff(g1, {VarKind::fiber, 1})) == y(1));

    const Expression g2 = parse("2*y1*y2", 2);
    const Expression n22 = diff(g2, {VarKind::fiber, 2});
    CHECK(simplify(n22) == simplify(constant(2.0) * y(1)));

    const auto samples = sample_points(2, 10, 7);
    for (const auto& p : samples) {
        const double fd = oracle::central_difference(g2, p, {VarKind::fiber, 2});
        CHECK(std::abs(eval(n22, p) - fd) <= 1e-6 * std::abs(fd));
    }

    const Expression norm = parse("sqrt(y1^2+y2^2)", 2);
    const Expression theta1 = diff(norm, {VarKind::fiber, 1});
    const Expression expected = y(1) / norm;
    for (const auto& p : samples) {
        const double fd = oracle::central_difference(norm, p, {VarKind::fiber, 1});
        CHECK(std::abs(eval(theta1, p) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        CHECK(eval(theta1, p) == doctest::Approx(eval(expected, p)).epsilon(1e-14));
    }
}

TEST_CASE("eval examples")
{
    CHECK(eval(parse("2*y1*y2", 2), pt({0, 0}, {1, 3})) == 6.0);
    CHECK(eval(parse("sqrt(y1^2+y2^2)", 2), pt({0, 0}, {3, 4})) == 5.0);
    CHECK_THROWS_AS((void)eval(parse("1/y1", 2), pt({0, 0}, {0, 1})), EvalError);
    CHECK_THROWS_AS((void)eval(parse("log(y1)", 2), pt({0, 0}, {-1, 1})), EvalError);
    CHECK_THROWS_AS((void)eval(parse("sqrt(y1)", 2), pt({0, 0}, {-1, 1})), EvalError);
    CHECK_THROWS_AS((void)Point::checked({0, 0}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)Point::checked({0, 0}, {1e-7, 0}), std::invalid_argument);
    CHECK_NOTHROW((void)Point::checked({0, 0}, {0, 1}));
}

TEST_CASE("simplify examples")
{
    CHECK(simplify(parse("y1 - y1", 1)).is_constant(0.0));
    CHECK(simplify(parse("1*x2 + 0", 2)) == x(2));
    CHECK(simplify(parse("y1*y2 - y2*y1", 2)).is_constant(0.0));
    CHECK(simplify(parse("(y1+y2)^2 - y1^2 - 2*y1*y2 - y2^2", 2)).is_constant(0.0));
    CHECK(simplify(parse("sqrt(y1^2+y2^2)^2 - y1^2 - y2^2", 2)).is_constant(0.0));
    CHECK(simplify(parse("(y1^2+y2^2)/(y1^2+y2^2)", 2)).is_constant(1.0));
    CHECK(simplify(parse("y1/sqrt(y1^2+y2^2) - y1*sqrt(y1^2+y2^2)^-1", 2)).is_constant(0.0));
    CHECK(simplify(parse("abs(y1^2)", 1)) == simplify(parse("y1^2", 1)));
    CHECK(simplify(parse("3*2 + 1", 1)).is_constant(7.0));
}

TEST_CASE("is_zero examples")
{
    const auto samples = sample_points(2, 20, 42);
    CHECK(is_zero(parse("y1 - y1", 2), samples, 1e-9).level == ZeroLevel::symbolic_zero);

    const ZeroVerdict trig = is_zero(parse("sin(x1)^2 + cos(x1)^2 - 1", 2), samples, 1e-9);
    CHECK(trig.level == ZeroLevel::numeric_zero);
    CHECK(trig.max_residual < 1e-9);

    std::vector<Point> with_witness = samples;
    with_witness.push_back(pt({0, 0}, {1, 1}));
    const ZeroVerdict nz = is_zero(parse("y1*y2", 2), std::span<const Point>(with_witness).last(1), 1e-9);
    CHECK(nz.level == ZeroLevel::nonzero);
    REQUIRE(nz.witness.has_value());
    CHECK(nz.witness_value == doctest::Approx(1.0));

    CHECK_THROWS_AS((void)is_zero(parse("y1", 2), std::span<const Point>{}, 1e-9), std::invalid_argument);
    const std::vector<Point> bad{pt({0, 0}, {0, 1})};
    CHECK_THROWS_AS((void)is_zero(parse("1/y1 + 1", 2), bad, 1e-9), EvalError);
}

TEST_CASE("abs differentiates through u/|u| and flags the kink")
{
    const Expression e = parse("abs(y1)*y2", 2);
    const Expression d = diff(e, {VarKind::fiber, 1});
    CHECK(eval(d, pt({0, 0}, {2, 3})) == doctest::Approx(3.0));
    CHECK(eval(d, pt({0, 0}, {-2, 3})) == doctest::Approx(-3.0));
    CHECK_THROWS_AS((void)eval(d, pt({0, 0}, {0, 3})), EvalError);

    std::vector<Point> samples{pt({0, 0}, {0, 1}), pt({0, 0}, {1, 1})};
    const ZeroVerdict v = is_zero(d - y(2), samples, 1e-9);
    CHECK(v.skipped == 1);
    CHECK(v.evaluated == 1);
    CHECK(v.is_zero());
}

TEST_CASE("sample points live on the annulus and are reproducible")
{
    const auto a = sample_points(3, 50, 42);
    const auto b = sample_points(3, 50, 42);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].fiber_norm() >= 0.5 - 1e-12);
        CHECK(a[i].fiber_norm() <= 2.0 + 1e-12);
        for (double v : a[i].x) CHECK(std::abs(v) <= 1.0);
    }
    CHECK(sample_points(3, 5, 43)[0].x != a[0].x);
}

TEST_CASE("property: derivative oracle on generated expressions")
{
    oracle::ExpressionGenerator gen(2, 1234);
    const auto samples = sample_points(2, 5, 99);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        const Expression e = gen.generate(3);
        for (const auto& v : oracle::all_variables(2)) {
            const Expression d = diff(e, v);
            for (const auto& p : samples) {
                const double fd = oracle::central_difference(e, p, v);
                const double sym = eval(d, p);
                CHECK_MESSAGE(std::abs(sym - fd) <= 1e-5 * (1.0 + std::abs(sym)), to_string(e));
                ++checked;
            }
        }
    }
    CHECK(checked == 200 * 4 * 5);
}

TEST_CASE("property: simplify preserves value and print/parse round-trips")
{
    oracle::ExpressionGenerator gen(2, 77);
    const auto samples = sample_points(2, 50, 5);
    for (int t = 0; t < 100; ++t) {
        const Expression e = gen.generate_with_abs(3);
        const Expression s = simplify(e);
        for (const auto& p : samples) {
            const double a = eval(e, p);
            CHECK_MESSAGE(std::abs(a - eval(s, p)) < 1e-12 * (1.0 + std::abs(a)) * 10, to_string(e));
        }
        const Expression reparsed = parse(to_string(e), 2);
        CHECK_MESSAGE(simplify(reparsed) == s, to_string(e));
    }
}

TEST_CASE("property: Schwarz symmetry of mixed partials")
{
    oracle::ExpressionGenerator gen(2, 4321);
    const auto samples = sample_points(2, 5, 11);
    const auto vars = oracle::all_variables(2);
    for (int t = 0; t < 40; ++t) {
        const Expression e = gen.generate(3);
        const Variable u = vars[static_cast<std::size_t>(t) % vars.size()];
        const Variable v = vars[static_cast<std::size_t>(t * 7 + 1) % vars.size()];
        const Expression uv = diff(diff(e, u), v);
        const Expression vu = diff(diff(e, v), u);
        for (const auto& p : samples) {
            const double a = eval(uv, p);
            CHECK(std::abs(a - eval(vu, p)) < 1e-8 * (1.0 + std::abs(a)));
        }
    }
}
