// Acceptance criteria, one PASS/FAIL line each.  Exit status is the number
// of failed criteria.

#include "oracles.hpp"

#include "spraylab/geodesics.hpp"
#include "spraylab/involutivity.hpp"
#include "spraylab/metrizability.hpp"
#include "spraylab/presets.hpp"
#include "spraylab/spray.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace spraylab;

namespace {

constexpr double kTol = 1e-9;

struct Outcome
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

using Vec = std::vector<double>;

Outcome involutivity_counts()
{
    Outcome o;
    const std::vector<std::string> presets{"flat2", "anderson-thompson", "yang(lambda=0.5)", "riemannian",
                                           "flat3", "yang(lambda=0.5,n=3)", "flat(n=4)", "yang(lambda=0.5,n=4)"};
    int points = 0;
    for (const auto& name : presets) {
        const Spray S = preset(name).spray;
        const int n = S.n;
        for (const auto& p : sample_points(n, 10, 2024)) {
            const DimensionReport r = cartan_test(S, p);
            ++points;
            std::vector<int> dims;
            for (int j = 1; j <= n; ++j) dims.push_back(n * (n - j));
            o.require(r.dim_g1 == n * n, name + ": dim g1 = " + std::to_string(r.dim_g1));
            o.require(r.dim_g2 == n * n * (n + 1) / 2, name + ": dim g2 = " + std::to_string(r.dim_g2));
            o.require(r.quasi_regular.dims == dims, name + ": per-j dims differ");
            o.require(r.quasi_regular.equality, name + ": Cartan equality fails");
            o.require(!r.indeterminate, name + ": ill-conditioned rank");
        }
    }
    if (o.pass) o.detail = std::to_string(points) + " points; 4/6, 9/18, 16/40 with n(n-j) per-j dims";
    return o;
}

Outcome structural_identities()
{
    Outcome o;
    int checks = 0;
    for (const char* name : {"flat2", "anderson-thompson", "yang(lambda=0.5)", "riemannian"}) {
        const Spray S = preset(name).spray;
        const auto samples = sample_points(S.n, 50, 42);
        for (const auto& c : identity_suite(S, samples, kTol)) {
            ++checks;
            o.require(c.verdict.is_zero(), std::string(name) + ": " + c.name + " residual " +
                                               std::to_string(c.verdict.max_residual));
        }
    }
    if (o.pass) o.detail = std::to_string(checks) + " identity verdicts zero";
    return o;
}

Outcome necessity_round_trip()
{
    Outcome o;
    for (const int n : {2, 3}) {
        const Spray flat = preset("flat(n=" + std::to_string(n) + ")").spray;
        const auto samples = sample_points(n, 50, 42);
        const Expression F = euclidean_norm(n);
        for (const double lambda : {0.0, 0.5}) {
            const Expression P = constant(lambda) * F;
            const Spray S = projective_transform(flat, P, samples);
            const SemiBasicOneForm theta = euler_poincare(F, n, samples);
            const ConditionReport rep = check_conditions(S, theta, samples, kTol);
            const std::string tag = "n=" + std::to_string(n) + " lambda=" + std::to_string(lambda);
            for (const auto& v : rep.verdicts) o.require(v.status == Status::pass, tag + ": " + v.name);
            if (!rep.passed()) continue;
            const RecoveredFinsler rec = recover_finsler(S, theta, samples, kTol);
            double errF = 0.0, errP = 0.0;
            for (const auto& p : samples) {
                errF = std::max(errF, std::abs(eval(rec.F, p) - eval(F, p)));
                errP = std::max(errP, std::abs(eval(rec.deformation, p) - eval(P, p)));
            }
            o.require(errF < kTol, tag + ": F error " + std::to_string(errF));
            o.require(errP < kTol, tag + ": P error " + std::to_string(errP));
        }
    }
    if (o.pass) o.detail = "six verdicts pass; F and P recovered to 1e-9 (n=2,3)";
    return o;
}

Outcome obstruction_vanishing()
{
    Outcome o;
    struct Case
    {
        std::string label;
        Spray S;
        SemiBasicOneForm theta;
    };
    const auto F3 = euclidean_norm(3);
    std::vector<Case> cases;
    auto add = [&](const std::string& label, const Spray& S, std::vector<std::string> th) {
        std::vector<Expression> comps;
        for (const auto& s : th) comps.push_back(parse(s, S.n));
        cases.push_back({label, S, SemiBasicOneForm(S.n, comps)});
    };
    // n = 2: any spray, any θ
    add("anderson-thompson, d_J|y|", preset("anderson-thompson").spray, {"y1/sqrt(y1^2+y2^2)", "y2/sqrt(y1^2+y2^2)"});
    add("anderson-thompson, arbitrary", preset("anderson-thompson").spray, {"x1*y2 + y1^2", "sin(x2)*y1"});
    add("riemannian, arbitrary", preset("riemannian").spray, {"exp(x1)*y2", "x2*y1*y2"});
    // flat, any θ
    add("flat3, arbitrary", preset("flat3").spray, {"x1*y2 + y3^2", "x3*y1", "sin(x2)*y1*y2"});
    add("flat(n=4), arbitrary", preset("flat(n=4)").spray, {"x2*y1", "y3*y4", "x1", "y1^2"});
    // Yang with a condition-satisfying θ
    {
        const auto samples = sample_points(3, 50, 42);
        cases.push_back({"yang n=3, d_J|y|", preset("yang(lambda=0.5,n=3)").spray, euler_poincare(F3, 3, samples)});
    }
    for (const auto& c : cases) {
        const auto samples = sample_points(c.S.n, 50, 42);
        const ConditionReport rep = check_conditions(c.S, c.theta, samples, kTol);
        const Obstruction& ob = rep.obstruction_detail;
        o.require(ob.generic.is_zero(), c.label + ": generic d_R theta nonzero");
        o.require(ob.agree(), c.label + ": generic and cyclic paths disagree");
        bool closed_conditions = true;
        for (const auto& name : {"L_C theta = 0", "d_J theta = 0", "d_h theta = 0"})
            closed_conditions = closed_conditions && rep.verdict(name).status == Status::pass;
        if (closed_conditions) o.require(ob.generic.is_zero() && ob.cyclic.is_zero(), c.label + ": paths not both zero");
    }
    if (o.pass) o.detail = std::to_string(cases.size()) + " cases; generic and cyclic paths agree";
    return o;
}

Outcome negative_controls()
{
    Outcome o;
    const auto samples = sample_points(2, 50, 42);
    {
        const SemiBasicOneForm theta = euler_poincare(euclidean_norm(2), 2, samples);
        const ConditionReport rep = check_conditions(preset("anderson-thompson").spray, theta, samples, kTol);
        const auto& v = rep.verdict("d_h theta = 0");
        o.require(v.status == Status::fail, "anderson-thompson d_h theta did not fail");
        o.require(v.witness.has_value(), "anderson-thompson d_h theta has no witness");
    }
    {
        const EquivalenceReport r = projective_factor(preset("flat2").spray, preset("anderson-thompson").spray, samples);
        o.require(!r.passed(), "projective_factor(flat2, anderson-thompson) passed");
        o.require(r.witness && r.witness->y == Vec{1, 1}, "witness is not y = (1,1)");
    }
    {
        const SemiBasicOneForm theta(2, {x(1), constant(0.0)});
        const ConditionReport rep = check_conditions(preset("flat2").spray, theta, samples, kTol);
        o.require(rep.verdict("rank d theta = 2n-2").status == Status::fail, "x1 dx1 rank did not fail");
        o.require(rep.verdict("i_S theta > 0").status == Status::fail, "x1 dx1 positivity did not fail");
    }
    if (o.pass) o.detail = "d_h witness, y=(1,1) witness, rank and positivity failures";
    return o;
}

Outcome geodesic_layer()
{
    Outcome o;
    std::ostringstream d;
    const ConvergenceOrder c = convergence_order(preset("anderson-thompson").spray, Vec{0, 0}, Vec{1, 0.5}, 1.0, 0.02, 2);
    o.require(c.order >= 3.5 && c.order <= 4.5, "convergence order " + std::to_string(c.order));
    d << "order " << c.order;

    const Vec x0{0, 0}, y0{1, 0};
    const GeodesicTrace a = integrate(preset("flat2").spray, x0, y0, 1.0, 1000);
    const GeodesicTrace b = integrate(preset("yang(lambda=0.5)").spray, x0, y0, 1.0, 1000);
    const double range = std::min(arclength(a).back(), arclength(b).back());
    o.require(range >= 0.5, "arclength below 0.5");
    const double dist = trace_compare(a, b);
    o.require(dist < 1e-4, "trace distance " + std::to_string(dist));
    d << ", trace distance " << dist;

    const auto samples = sample_points(2, 50, 42);
    const EquivalenceReport r = projective_factor(preset("flat2").spray, preset("yang(lambda=0.5)").spray, samples);
    double worst = 0.0;
    for (const auto& s : r.samples) {
        const double expected = 0.5 * s.point.fiber_norm();
        worst = std::max(worst, std::abs(s.P - expected) / expected);
    }
    o.require(r.passed(), "flat2 vs yang not projectively equivalent");
    o.require(worst < 1e-8, "P relative error " + std::to_string(worst));
    d << ", P rel. error " << worst;
    if (o.pass) o.detail = d.str();
    return o;
}

Outcome expression_layer()
{
    Outcome o;
    oracle::ExpressionGenerator gen(2, 500);
    const auto samples = sample_points(2, 3, 7);
    int bad_fd = 0, bad_rt = 0;
    for (int t = 0; t < 500; ++t) {
        const Expression e = gen.generate(3);
        for (const auto& v : oracle::all_variables(2)) {
            const Expression de = diff(e, v);
            for (const auto& p : samples) {
                const double fd = oracle::central_difference(e, p, v);
                const double sym = eval(de, p);
                if (std::abs(sym - fd) > 1e-5 * (1.0 + std::abs(sym))) ++bad_fd;
            }
        }
        if (!(simplify(parse(to_string(e), 2)) == simplify(e))) ++bad_rt;
    }
    o.require(bad_fd == 0, std::to_string(bad_fd) + " derivative mismatches");
    o.require(bad_rt == 0, std::to_string(bad_rt) + " round-trip mismatches");
    if (o.pass) o.detail = "500 ASTs: derivatives and round-trips agree";
    return o;
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome determinism()
{
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path();
    const std::vector<std::string> invocations{
        "analyze --preset riemannian",
        "metrizable --preset 'yang(lambda=0.5)'",
        "involutivity --preset flat3",
        "geodesics --preset flat2 --compare 'yang(0.5)' --y0 0.6,0.8",
    };
    int k = 0;
    for (const auto& args : invocations) {
        std::string out[2];
        for (int r = 0; r < 2; ++r) {
            const std::string path = (dir / ("spraylab_acceptance_" + std::to_string(k) + "_" + std::to_string(r) + ".json")).string();
            const std::string cmd = std::string(SPRAYLAB_CLI) + " " + args + " --out " + path;
            const int status = std::system(cmd.c_str());
            o.require(status != -1 && WEXITSTATUS(status) != 1, args + ": usage error");
            out[r] = slurp(path);
        }
        o.require(!out[0].empty() && out[0] == out[1], args + ": reports differ");
        ++k;
    }
    if (o.pass) o.detail = std::to_string(invocations.size()) + " commands byte-identical across runs";
    return o;
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        const char* title;
        std::function<Outcome()> run;
        double limit_seconds; // 0: none
    };
    const std::vector<Criterion> criteria{
        {1, "involutivity counts", involutivity_counts, 5.0},
        {2, "structural identities", structural_identities, 30.0},
        {3, "necessity round-trip", necessity_round_trip, 0.0},
        {4, "obstruction vanishing", obstruction_vanishing, 0.0},
        {5, "negative controls", negative_controls, 0.0},
        {6, "geodesic layer", geodesic_layer, 0.0},
        {7, "expression layer", expression_layer, 0.0},
        {8, "determinism", determinism, 0.0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0.0 && secs >= c.limit_seconds) {
            o.pass = false;
            o.detail += (o.detail.empty() ? "" : "; ") + std::string("over time limit");
        }
        if (!o.pass) ++failed;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " " << c.title << " (" << timing
                  << "): " << o.detail << '\n';
    }
    return failed;
}
