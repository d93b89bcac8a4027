#include "spraylab/spray.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spraylab {

namespace {

Variable fy(int i) { return {VarKind::fiber, i + 1}; }
Variable fx(int i) { return {VarKind::base, i + 1}; }

std::size_t u(int i) { return static_cast<std::size_t>(i); }

} // namespace

Spray::Spray(int dim, std::vector<Expression> coefficients) : n(dim), G(std::move(coefficients))
{
    if (n < 1) throw std::invalid_argument("Spray: dimension must be >= 1");
    if (static_cast<int>(G.size()) != n) throw std::invalid_argument("Spray: need exactly n coefficients");
    for (const auto& g : G)
        if (max_index(g) > n) throw std::invalid_argument("Spray: coefficient uses a variable beyond n");
}

Spray Spray::parse(int dim, const std::vector<std::string>& coefficients)
{
    std::vector<Expression> G;
    for (const auto& s : coefficients) G.push_back(spraylab::parse(s, dim));
    return Spray(dim, std::move(G));
}

VectorValuedForm Spray::vector_field() const
{
    std::vector<Expression> c(u(2 * n));
    for (int i = 0; i < n; ++i) {
        c[u(i)] = y(i + 1);
        c[u(n + i)] = constant(-2.0) * G[u(i)];
    }
    return VectorValuedForm::vector_field(n, c);
}

Expression Spray::apply(const Expression& f) const
{
    std::vector<Expression> terms;
    for (int k = 0; k < n; ++k) {
        terms.push_back(y(k + 1) * diff(f, fx(k)));
        terms.push_back(constant(-2.0) * G[u(k)] * diff(f, fy(k)));
    }
    return simplify(sum(terms));
}

Expression homogeneity_residual(const Expression& f, int n, int k)
{
    std::vector<Expression> terms;
    for (int j = 0; j < n; ++j) terms.push_back(y(j + 1) * diff(f, fy(j)));
    terms.push_back(constant(-static_cast<double>(k)) * f);
    return simplify(sum(terms));
}

std::vector<ZeroVerdict> validate(const Spray& S, std::span<const Point> samples, double tol)
{
    std::vector<ZeroVerdict> out;
    for (const auto& g : S.G) out.push_back(is_zero(homogeneity_residual(g, S.n, 2), samples, tol));
    return out;
}

// ---------------------------------------------------------------------------

Expression Connection::delta(const Expression& f, int j) const
{
    std::vector<Expression> terms{diff(f, fx(j))};
    for (int k = 0; k < n; ++k) terms.push_back(-(N[u(k)][u(j)] * diff(f, fy(k))));
    return simplify(sum(terms));
}

VectorValuedForm Connection::horizontal_local() const
{
    VectorValuedForm h(n, 1);
    for (int i = 0; i < n; ++i) {
        h.component(i).set({i}, constant(1.0));
        for (int j = 0; j < n; ++j) h.component(n + j).set({i}, simplify(-N[u(j)][u(i)]));
    }
    return h;
}

Connection connection(const Spray& S)
{
    Connection c;
    c.n = S.n;
    c.N.assign(u(S.n), std::vector<Expression>(u(S.n)));
    for (int i = 0; i < S.n; ++i)
        for (int j = 0; j < S.n; ++j) c.N[u(i)][u(j)] = simplify(diff(S.G[u(i)], fy(j)));
    return c;
}

Projectors projectors(const Spray& S)
{
    const VectorValuedForm sj = fn_bracket(S.vector_field(), vertical_endomorphism(S.n));
    const VectorValuedForm id = identity_form(S.n);
    return {constant(0.5) * (id - sj), constant(0.5) * (id + sj)};
}

// ---------------------------------------------------------------------------

VectorValuedForm JacobiEndomorphism::form() const
{
    VectorValuedForm phi(n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) phi.component(n + i).set({j}, R[u(i)][u(j)]);
    return phi;
}

JacobiEndomorphism jacobi(const Spray& S)
{
    const Connection c = connection(S);
    JacobiEndomorphism J;
    J.n = S.n;
    J.R.assign(u(S.n), std::vector<Expression>(u(S.n)));
    for (int i = 0; i < S.n; ++i)
        for (int j = 0; j < S.n; ++j) {
            std::vector<Expression> terms{constant(2.0) * c.delta(S.G[u(i)], j), -S.apply(c.N[u(i)][u(j)])};
            for (int k = 0; k < S.n; ++k) terms.push_back(c.N[u(i)][u(k)] * c.N[u(k)][u(j)]);
            J.R[u(i)][u(j)] = simplify(sum(terms));
        }
    return J;
}

VectorValuedForm jacobi_via_bracket(const Spray& S)
{
    const Projectors p = projectors(S);
    return compose(p.v, fn_bracket(S.vector_field(), p.h));
}

// ---------------------------------------------------------------------------

VectorValuedForm CurvatureTensor::form() const
{
    VectorValuedForm r(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) r.component(n + i).set({j, k}, R[u(i)][u(j)][u(k)]);
    return r;
}

CurvatureTensor curvature(const Spray& S)
{
    const Connection c = connection(S);
    CurvatureTensor t;
    t.n = S.n;
    t.R.assign(u(S.n), Matrix(u(S.n), std::vector<Expression>(u(S.n))));
    for (int i = 0; i < S.n; ++i)
        for (int j = 0; j < S.n; ++j)
            for (int k = j + 1; k < S.n; ++k) {
                const Expression r = simplify(c.delta(c.N[u(i)][u(j)], k) - c.delta(c.N[u(i)][u(k)], j));
                t.R[u(i)][u(j)][u(k)] = r;
                t.R[u(i)][u(k)][u(j)] = simplify(-r);
            }
    return t;
}

// ---------------------------------------------------------------------------

std::string to_string(SprayClass c)
{
    switch (c) {
    case SprayClass::flat: return "flat";
    case SprayClass::isotropic: return "isotropic";
    case SprayClass::general: return "general";
    }
    return "unknown";
}

Classification classify(const Spray& S, std::span<const Point> samples, double rel_tol, double zero_tol)
{
    const int n = S.n;
    Classification out;
    out.degenerate = n == 1;
    const JacobiEndomorphism phi = jacobi(S);

    if (n == 1) {
        out.kind = SprayClass::flat;
        out.curvature_verdict = is_zero(phi.R[0][0], samples, zero_tol);
        return out;
    }

    const CurvatureTensor R = curvature(S);
    out.curvature_verdict = is_zero(R.form(), samples, zero_tol);

    std::vector<Expression> diag;
    for (int i = 0; i < n; ++i) diag.push_back(phi.R[u(i)][u(i)]);
    out.lambda = simplify(sum(diag) / constant(static_cast<double>(n - 1)));
    std::vector<Expression> sq;
    for (int i = 0; i < n; ++i) sq.push_back(pow(y(i + 1), 2));
    const Expression norm2 = sum(sq);
    for (int j = 0; j < n; ++j) {
        std::vector<Expression> terms;
        for (int i = 0; i < n; ++i) terms.push_back(y(i + 1) * phi.R[u(i)][u(j)]);
        terms.push_back(-(out.lambda * y(j + 1)));
        out.eta.push_back(simplify(sum(terms) / norm2));
    }

    if (out.curvature_verdict.is_zero()) {
        out.kind = SprayClass::flat;
        return out;
    }

    // Pointwise numeric decomposition.
    bool isotropic = true;
    for (const auto& p : samples) {
        IsotropySample s;
        s.point = p;
        std::vector<std::vector<double>> m(u(n), std::vector<double>(u(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m[u(i)][u(j)] = eval(phi.R[u(i)][u(j)], p);
                s.phi_norm = std::max(s.phi_norm, std::abs(m[u(i)][u(j)]));
            }
        double tr = 0.0, yy = 0.0;
        for (int i = 0; i < n; ++i) {
            tr += m[u(i)][u(i)];
            yy += p.y[u(i)] * p.y[u(i)];
        }
        s.lambda = tr / (n - 1);
        s.eta.resize(u(n));
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += p.y[u(i)] * m[u(i)][u(j)];
            s.eta[u(j)] = (acc - s.lambda * p.y[u(j)]) / yy;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double r = m[u(i)][u(j)] - (i == j ? s.lambda : 0.0) - p.y[u(i)] * s.eta[u(j)];
                s.residual = std::max(s.residual, std::abs(r));
            }
        const double rel = s.phi_norm > 0.0 ? s.residual / s.phi_norm : s.residual;
        out.max_relative_residual = std::max(out.max_relative_residual, rel);
        if (rel >= rel_tol) isotropic = false;
        out.samples.push_back(std::move(s));
    }
    out.kind = isotropic ? SprayClass::isotropic : SprayClass::general;
    return out;
}

Spray projective_transform(const Spray& S, const Expression& P, std::span<const Point> samples, double tol)
{
    if (max_index(P) > S.n) throw std::invalid_argument("projective_transform: P uses a variable beyond n");
    const ZeroVerdict v = is_zero(homogeneity_residual(P, S.n, 1), samples, tol);
    if (!v.is_zero())
        throw std::invalid_argument("projective_transform: P is not 1-homogeneous in y (residual " +
                                    std::to_string(v.max_residual) + ")");
    std::vector<Expression> G;
    for (int i = 0; i < S.n; ++i) G.push_back(simplify(S.G[u(i)] + P * y(i + 1)));
    return Spray(S.n, std::move(G));
}

std::vector<IdentityCheck> identity_suite(const Spray& S, std::span<const Point> samples, double tol)
{
    const int n = S.n;
    const VectorValuedForm J = vertical_endomorphism(n);
    const VectorValuedForm C = liouville(n);
    const VectorValuedForm id = identity_form(n);
    const VectorValuedForm sv = S.vector_field();
    const Projectors p = projectors(S);
    const VectorValuedForm phi = jacobi(S).form();
    const VectorValuedForm R = curvature(S).form();

    std::vector<IdentityCheck> out;
    auto check = [&](std::string name, const VectorValuedForm& residual) {
        out.push_back({std::move(name), is_zero(residual, samples, tol)});
    };
    check("h + v = Id", p.h + p.v - id);
    check("h∘h = h", compose(p.h, p.h) - p.h);
    check("v∘v = v", compose(p.v, p.v) - p.v);
    check("h∘v = 0", compose(p.h, p.v));
    check("h = δ/δx^i ⊗ dx^i", p.h - connection(S).horizontal_local());
    check("[J,J] = 0", fn_bracket(J, J));
    check("[J,h] = 0", fn_bracket(J, p.h));
    check("[C,h] = 0", fn_bracket(C, p.h));
    if (n >= 2) check("[C,R] = 0", fn_bracket(C, R));
    check("[C,Φ] = Φ", fn_bracket(C, phi) - phi);
    if (n >= 2) {
        check("Φ = i_S R", phi - inner_product(sv, R));
        check("[J,Φ] = 3R", fn_bracket(J, phi) - constant(3.0) * R);
        check("½[h,h] = R", constant(0.5) * fn_bracket(p.h, p.h) - R);
    }
    check("Φ = v∘[S,h]", phi - jacobi_via_bracket(S));
    return out;
}

} // namespace spraylab
