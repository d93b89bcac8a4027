#include "spraylab/metrizability.hpp"
#include "spraylab/linalg.hpp"

#include <algorithm>
#include <limits>

namespace spraylab {

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }
Variable fy(int i) { return {VarKind::fiber, i + 1}; }

ConditionVerdict zero_condition(std::string name, const ScalarForm& w, std::span<const Point> samples, double tol)
{
    ConditionVerdict v;
    v.name = std::move(name);
    v.zero = is_zero(w, samples, tol);
    v.status = v.zero->is_zero() ? Status::pass : Status::fail;
    v.witness = v.zero->witness;
    if (!v.zero->is_zero()) v.detail = "max residual " + std::to_string(v.zero->max_residual);
    return v;
}

DenseMatrix two_form_matrix(const ScalarForm& w, const Point& p)
{
    const int m = 2 * w.dim();
    DenseMatrix a(u(m), std::vector<double>(u(m), 0.0));
    for (const auto& [I, e] : w.components()) {
        const double v = eval(e, p);
        a[u(I[0])][u(I[1])] = v;
        a[u(I[1])][u(I[0])] = -v;
    }
    return a;
}

} // namespace

SemiBasicOneForm::SemiBasicOneForm(int dim, std::vector<Expression> components) : n(dim), theta(std::move(components))
{
    if (static_cast<int>(theta.size()) != n) throw std::invalid_argument("SemiBasicOneForm: need exactly n components");
}

ScalarForm SemiBasicOneForm::form() const
{
    ScalarForm w(n, 1);
    for (int i = 0; i < n; ++i) w.set({i}, simplify(theta[u(i)]));
    return w;
}

Expression SemiBasicOneForm::contract_liouville() const
{
    std::vector<Expression> terms;
    for (int i = 0; i < n; ++i) terms.push_back(theta[u(i)] * y(i + 1));
    return simplify(sum(terms));
}

SemiBasicOneForm euler_poincare(const Expression& F, int n, std::span<const Point> samples, double tol)
{
    const ZeroVerdict h = is_zero(homogeneity_residual(F, n, 1), samples, tol);
    if (!h.is_zero())
        throw std::invalid_argument("euler_poincare: F is not 1-homogeneous in y (residual " +
                                    std::to_string(h.max_residual) + ")");
    std::vector<Expression> theta;
    for (int i = 0; i < n; ++i) theta.push_back(simplify(diff(F, fy(i))));
    return {n, std::move(theta)};
}

ClosedFormOperators closed_form_operators(const Spray& S, const SemiBasicOneForm& theta)
{
    const int n = S.n;
    if (theta.n != n) throw std::invalid_argument("closed_form_operators: dimension mismatch");
    const Connection c = connection(S);
    ClosedFormOperators out{ScalarForm(n, 1), ScalarForm(n, 2), ScalarForm(n, 2)};
    for (int i = 0; i < n; ++i) {
        std::vector<Expression> terms;
        for (int j = 0; j < n; ++j) terms.push_back(y(j + 1) * diff(theta.theta[u(i)], fy(j)));
        out.lc.set({i}, simplify(sum(terms)));
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const Expression& ta = theta.theta[u(a)];
            const Expression& tb = theta.theta[u(b)];
            out.dj.set({a, b}, simplify(diff(tb, fy(a)) - diff(ta, fy(b))));
            out.dh.set({a, b}, simplify(c.delta(tb, a) - c.delta(ta, b)));
        }
    return out;
}

AngularMetric angular_metric(const SemiBasicOneForm& theta, std::span<const Point> samples)
{
    const int n = theta.n;
    AngularMetric out;
    out.n = n;
    out.F = theta.contract_liouville();
    out.h.assign(u(n), std::vector<Expression>(u(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.h[u(i)][u(j)] = simplify(out.F * diff(theta.theta[u(i)], fy(j)));
    for (const auto& p : samples) {
        DenseMatrix m(u(n), std::vector<double>(u(n)));
        try {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m[u(i)][u(j)] = eval(out.h[u(i)][u(j)], p);
        } catch (const EvalError&) {
            ++out.skipped;
            out.ranks.push_back(-1);
            continue;
        }
        out.ranks.push_back(numeric_rank(m).rank);
    }
    return out;
}

std::string to_string(Status s)
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
    }
    return "unknown";
}

Obstruction obstruction(const Spray& S, const SemiBasicOneForm& theta, std::span<const Point> samples, double tol)
{
    const int n = S.n;
    const CurvatureTensor R = curvature(S);
    Obstruction out{ScalarForm(n, std::min(3, 2 * n)), {}, {}, {}, {}};
    if (2 * n >= 3) out.d_r_theta = lie_type_derivative(R.form(), theta.form());
    out.generic = is_zero(out.d_r_theta, samples, tol);

    // Bianchi cyclic sum built directly from h_ij and R^k_jl.
    const AngularMetric am = angular_metric(theta, {});
    auto Rk = [&](int k, int a, int b) -> const Expression& { return R.R[u(k)][u(a)][u(b)]; };
    std::vector<ZeroVerdict> parts;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                std::vector<Expression> terms;
                for (int k = 0; k < n; ++k) {
                    terms.push_back(am.h[u(i)][u(k)] * Rk(k, j, l));
                    terms.push_back(am.h[u(l)][u(k)] * Rk(k, i, j));
                    terms.push_back(am.h[u(j)][u(k)] * Rk(k, l, i));
                }
                out.bianchi_index.push_back({i, j, l});
                out.bianchi.push_back(simplify(sum(terms)));
                parts.push_back(is_zero(out.bianchi.back(), samples, tol));
            }
    out.cyclic = combine(parts);
    return out;
}

bool ConditionReport::passed() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const ConditionVerdict& v) { return v.status == Status::pass; });
}

const ConditionVerdict& ConditionReport::verdict(const std::string& name) const
{
    for (const auto& v : verdicts)
        if (v.name == name) return v;
    throw std::out_of_range("ConditionReport: no verdict named '" + name + "'");
}

ConditionReport check_conditions(const Spray& S, const SemiBasicOneForm& theta, std::span<const Point> samples, double tol)
{
    const int n = S.n;
    if (theta.n != n) throw std::invalid_argument("check_conditions: dimension mismatch");
    ConditionReport report;
    const ClosedFormOperators ops = closed_form_operators(S, theta);
    report.verdicts.push_back(zero_condition("L_C theta = 0", ops.lc, samples, tol));
    report.verdicts.push_back(zero_condition("d_J theta = 0", ops.dj, samples, tol));
    report.verdicts.push_back(zero_condition("d_h theta = 0", ops.dh, samples, tol));

    // i_Sθ > 0
    {
        ConditionVerdict v;
        v.name = "i_S theta > 0";
        const Expression F = theta.contract_liouville();
        double lo = std::numeric_limits<double>::infinity();
        int evaluated = 0;
        for (const auto& p : samples) {
            double value = 0.0;
            try {
                value = eval(F, p);
            } catch (const EvalError&) {
                continue;
            }
            ++evaluated;
            if (value < lo) {
                lo = value;
                v.witness = p;
            }
        }
        v.min_value = evaluated ? lo : 0.0;
        if (evaluated == 0) {
            v.status = Status::inconclusive;
            v.detail = "no sample could be evaluated";
        } else if (lo > kPositivityMargin) {
            v.status = Status::pass;
        } else if (lo > 0.0) {
            v.status = Status::inconclusive;
            v.detail = "minimum is positive but below the margin 1e-8";
        } else {
            v.status = Status::fail;
            v.detail = "minimum " + std::to_string(lo);
        }
        report.verdicts.push_back(std::move(v));
    }

    // rank dθ = 2n − 2, alongside rank h = n − 1
    report.angular = angular_metric(theta, samples);
    {
        ConditionVerdict v;
        v.name = "rank d theta = 2n-2";
        const ScalarForm dtheta = exterior_d(theta.form());
        int evaluated = 0;
        bool ok = true;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const Point& p = samples[s];
            int rank = -1;
            try {
                rank = numeric_rank(two_form_matrix(dtheta, p)).rank;
            } catch (const EvalError&) {
                v.ranks.push_back(-1);
                continue;
            }
            ++evaluated;
            v.ranks.push_back(rank);
            if (rank != 2 * n - 2 && ok) {
                ok = false;
                v.witness = p;
                v.detail = "rank " + std::to_string(rank) + " at the witness";
            }
            const int hr = report.angular.ranks[s];
            if (hr >= 0 && (rank == 2 * n - 2) != (hr == n - 1)) report.rank_equivalence = false;
        }
        v.status = evaluated == 0 ? Status::inconclusive : ok ? Status::pass : Status::fail;
        report.verdicts.push_back(std::move(v));
    }

    report.obstruction_detail = obstruction(S, theta, samples, tol);
    {
        ConditionVerdict v;
        v.name = "d_R theta = 0";
        v.zero = report.obstruction_detail.generic;
        v.status = v.zero->is_zero() ? Status::pass : Status::fail;
        v.witness = v.zero->witness;
        report.verdicts.push_back(std::move(v));
    }
    return report;
}

RecoveredFinsler recover_finsler(const Spray& S, const SemiBasicOneForm& theta, std::span<const Point> samples, double tol)
{
    const ConditionReport report = check_conditions(S, theta, samples, tol);
    if (!report.passed()) {
        std::string failing;
        for (const auto& v : report.verdicts)
            if (v.status != Status::pass) failing += (failing.empty() ? "" : ", ") + v.name;
        throw MetrizabilityError("recover_finsler: conditions not satisfied (" + failing + ")");
    }
    RecoveredFinsler out;
    out.F = theta.contract_liouville();
    out.P = simplify(S.apply(out.F) / (constant(2.0) * out.F));
    out.deformation = simplify(-out.P);
    out.p_homogeneity = is_zero(homogeneity_residual(out.P, S.n, 1), samples, tol);
    if (!out.p_homogeneity.is_zero()) throw MetrizabilityError("recover_finsler: P is not 1-homogeneous");
    out.S_F = projective_transform(S, out.P, samples, tol);
    out.geodesic = is_zero(out.S_F.apply(out.F), samples, tol);
    return out;
}

} // namespace spraylab
