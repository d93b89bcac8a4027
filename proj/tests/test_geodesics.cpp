#include "doctest.h"

#include "spraylab/geodesics.hpp"
#include "spraylab/presets.hpp"

#include <cmath>

using namespace spraylab;

namespace {

using Vec = std::vector<double>;

// Distance of x from the line x0 + s·d.
double off_line(const Vec& x, const Vec& x0, const Vec& d)
{
    double dd = 0.0, proj = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        dd += d[i] * d[i];
        proj += (x[i] - x0[i]) * d[i];
    }
    double r = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) r += std::pow(x[i] - x0[i] - proj / dd * d[i], 2);
    return std::sqrt(r);
}

// Second-difference residual on x alone, O(h²) but independent of y.
double second_difference_residual(const Spray& S, const GeodesicTrace& tr)
{
    double worst = 0.0;
    const double h = tr.step;
    for (std::size_t k = 1; k + 1 < tr.size(); ++k)
        for (int i = 0; i < tr.n; ++i) {
            const std::size_t c = static_cast<std::size_t>(i);
            const double acc = (tr.x[k + 1][c] - 2 * tr.x[k][c] + tr.x[k - 1][c]) / (h * h);
            worst = std::max(worst, std::abs(acc + 2 * eval(S.G[c], Point{tr.x[k], tr.y[k]})));
        }
    return worst;
}

} // namespace

TEST_CASE("flat spray integrates straight lines")
{
    const Spray S = preset("flat2").spray;
    const GeodesicTrace tr = integrate(S, Vec{0, 0}, Vec{1, 0}, 1.0, 100);
    REQUIRE(tr.size() == 101);
    CHECK_FALSE(tr.halted);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        CHECK(tr.x[k][0] == doctest::Approx(tr.t[k]).epsilon(1e-14));
        CHECK(std::abs(tr.x[k][1]) < 1e-15);
    }
}

TEST_CASE("ODE residual on anderson-thompson")
{
    const Spray S = preset("anderson-thompson").spray;
    for (const auto& p : sample_points(2, 5, 9)) {
        const GeodesicTrace tr = integrate(S, p.x, p.y, 1.0, 1000);
        if (tr.halted) continue;
        CHECK(ode_residual(S, tr) < 1e-6);
        // the y-free oracle agrees to its own O(h²) accuracy
        CHECK(second_difference_residual(S, tr) < 1e-4);
    }
}

TEST_CASE("RK4 convergence order")
{
    const Spray S = preset("anderson-thompson").spray;
    const ConvergenceOrder c = convergence_order(S, Vec{0, 0}, Vec{1, 0.5}, 1.0, 0.02, 2);
    REQUIRE(c.exponents.size() == 2);
    MESSAGE("exponents " << c.exponents[0] << " " << c.exponents[1]);
    CHECK(c.order >= 3.5);
    CHECK(c.order <= 4.5);

    // global error against a fine reference shrinks by ~16 per halving
    const GeodesicTrace ref = integrate(S, Vec{0, 0}, Vec{1, 0.5}, 1.0, 3200);
    double prev = 0.0;
    for (const int steps : {50, 100, 200}) {
        const GeodesicTrace tr = integrate(S, Vec{0, 0}, Vec{1, 0.5}, 1.0, steps);
        const double err = std::hypot(tr.x.back()[0] - ref.x.back()[0], tr.x.back()[1] - ref.x.back()[1]);
        if (prev > 0.0) {
            const double order = std::log2(prev / err);
            CHECK(order > 3.5);
            CHECK(order < 4.5);
        }
        prev = err;
    }
}

TEST_CASE("yang geodesics are straight")
{
    const Spray S = preset("yang(lambda=0.5)").spray;
    const Vec x0{0.2, -0.1}, y0{0.6, 0.8};
    const GeodesicTrace tr = integrate(S, x0, y0, 1.0, 1000);
    double worst = 0.0;
    for (const auto& x : tr.x) worst = std::max(worst, off_line(x, x0, y0));
    CHECK(worst < 1e-5);
    // |y(t)| = 1/(1 + 2λt)
    CHECK(std::hypot(tr.y.back()[0], tr.y.back()[1]) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("fiber collapse")
{
    const Spray S = preset("flat2").spray;
    CHECK_THROWS_AS(integrate(S, Vec{0, 0}, Vec{0, 0}, 1.0, 10), FiberCollapse);
    // an unstable step overflows: the eval error halts the trace
    const Spray decay = Spray::parse(1, {"10*y1*abs(y1)"});
    const GeodesicTrace tr = integrate(decay, Vec{0}, Vec{1}, 1e7, 1000);
    CHECK(tr.halted);
    CHECK(tr.halt_reason.find("non-finite") != std::string::npos);
    // exponential decay reaches the floor
    const Spray lin = Spray::parse(1, {"20*y1"});
    const GeodesicTrace t2 = integrate(lin, Vec{0}, Vec{1}, 10.0, 1000);
    CHECK(t2.halted);
    CHECK(t2.halt_reason == "fiber collapse");
    CHECK(t2.halt_time > 0.0);
    CHECK(t2.size() > 1);
}

TEST_CASE("projective_factor")
{
    const auto samples = sample_points(2, 50);
    SUBCASE("flat vs yang")
    {
        const EquivalenceReport r = projective_factor(preset("flat2").spray, preset("yang(lambda=0.5)").spray, samples);
        CHECK(r.passed());
        double worst = 0.0;
        for (const auto& s : r.samples) {
            const double expected = 0.5 * std::hypot(s.point.y[0], s.point.y[1]);
            worst = std::max(worst, std::abs(s.P - expected) / expected);
        }
        CHECK(worst < 1e-9);
    }
    SUBCASE("S vs S")
    {
        const Spray S = preset("riemannian").spray;
        const EquivalenceReport r = projective_factor(S, S, samples);
        CHECK(r.passed());
        for (const auto& s : r.samples) CHECK(s.P == 0.0);
    }
    SUBCASE("flat vs anderson-thompson")
    {
        const EquivalenceReport r = projective_factor(preset("flat2").spray, preset("anderson-thompson").spray, samples);
        CHECK_FALSE(r.passed());
        REQUIRE(r.witness);
        CHECK(r.witness->y == Vec{1, 1});
        CHECK(r.witness_D == Vec{2, 4});
    }
    SUBCASE("non-homogeneous difference")
    {
        // D = 2y: parallel, but P = 1 is 0-homogeneous
        const Spray a = preset("flat2").spray;
        const Spray b = Spray::parse(2, {"y1", "y2"});
        const EquivalenceReport r = projective_factor(a, b, samples);
        CHECK(r.parallel);
        CHECK_FALSE(r.homogeneous);
    }
}

TEST_CASE("trace_compare")
{
    const Spray flat = preset("flat2").spray;
    const Spray yang = preset("yang(lambda=0.5)").spray;
    const Vec x0{0, 0}, y0{1, 0};
    const GeodesicTrace a = integrate(flat, x0, y0, 1.0, 1000);
    CHECK(trace_compare(a, a) == 0.0);
    const GeodesicTrace b = integrate(yang, x0, y0, 1.0, 1000);
    CHECK(arclength(b).back() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(trace_compare(a, b) < 1e-4);

    const Spray at = preset("anderson-thompson").spray;
    const GeodesicTrace c = integrate(flat, x0, Vec{1, 1}, 1.0, 1000);
    const GeodesicTrace d = integrate(at, x0, Vec{1, 1}, 1.0, 1000);
    CHECK(trace_compare(c, d) > 1e-2);

    CHECK_THROWS(trace_compare(a, c));
}

TEST_CASE("projective invariance and homogeneity of traces")
{
    const Expression F = euclidean_norm(2);
    for (const char* name : {"flat2", "anderson-thompson", "riemannian"}) {
        const Spray S = preset(name).spray;
        for (const Expression& P : std::vector<Expression>{constant(0.3) * F, x(1) * y(1) + y(2), y(1) * y(1) / F}) {
            std::vector<Expression> G;
            for (int i = 0; i < 2; ++i) G.push_back(S.G[static_cast<std::size_t>(i)] + P * y(i + 1));
            const Spray T(2, G);
            const Vec x0{0.1, 0.2}, y0{0.8, 0.3};
            const GeodesicTrace a = integrate(S, x0, y0, 0.8, 800);
            const GeodesicTrace b = integrate(T, x0, y0, 0.8, 800);
            REQUIRE_FALSE(a.halted);
            REQUIRE_FALSE(b.halted);
            CHECK_MESSAGE(trace_compare(a, b) < 1e-4, name);
        }
        const GeodesicTrace a = integrate(S, Vec{0, 0}, Vec{0.6, 0.2}, 1.0, 1000);
        const GeodesicTrace b = integrate(S, Vec{0, 0}, Vec{1.2, 0.4}, 0.5, 1000);
        CHECK(trace_compare(a, b) < 1e-8);
    }
}

TEST_CASE("csv export")
{
    const GeodesicTrace tr = integrate(preset("flat2").spray, Vec{0, 0}, Vec{1, 0}, 1.0, 2);
    const std::string csv = to_csv(tr);
    CHECK(csv.rfind("t,x1,x2,y1,y2\n", 0) == 0);
    CHECK(csv.find("\n1,1,0,1,0\n") != std::string::npos);
}
