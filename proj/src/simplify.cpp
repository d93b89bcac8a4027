// Canonical form used by simplify(): a sum of monomials c·Π atom^k, where an
// atom is a variable, a function application with a canonical argument, or a
// normalized multi-term sum that could not be expanded (negative powers of
// sums).  Integer powers of sums are expanded and sqrt(u)^2 is rewritten as u.

#include "spraylab/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace spraylab {

namespace {

constexpr std::size_t kExpansionCap = 20000;

bool atom_less(const Expression& a, const Expression& b)
{
    if (a.hash() != b.hash()) return a.hash() < b.hash();
    return compare(a, b) < 0;
}

struct Factor
{
    Expression atom;
    int exp = 0;
};

using Monomial = std::vector<Factor>;

struct MonomialLess
{
    bool operator()(const Monomial& a, const Monomial& b) const
    {
        const std::size_t n = std::min(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!(a[i].atom == b[i].atom)) return atom_less(a[i].atom, b[i].atom);
            if (a[i].exp != b[i].exp) return a[i].exp < b[i].exp;
        }
        return a.size() < b.size();
    }
};

using Poly = std::map<Monomial, double, MonomialLess>;

void add_term(Poly& p, const Monomial& m, double c)
{
    if (c == 0.0) return;
    auto [it, inserted] = p.try_emplace(m, c);
    if (inserted) return;
    const double old = it->second;
    const double next = old + c;
    if (std::abs(next) <= 1e-14 * std::max(std::abs(old), std::abs(c)))
        p.erase(it);
    else
        it->second = next;
}

void add_into(Poly& dst, const Poly& src, double scale)
{
    for (const auto& [m, c] : src) add_term(dst, m, c * scale);
}

Poly constant_poly(double c)
{
    Poly p;
    if (c != 0.0) p.emplace(Monomial{}, c);
    return p;
}

Poly atom_poly(const Expression& atom, int exp = 1)
{
    Poly p;
    p.emplace(Monomial{Factor{atom, exp}}, 1.0);
    return p;
}

bool is_sqrt_atom(const Expression& e) { return e.kind() == NodeKind::unary && e.unary_op() == UnaryOp::sqrt; }

class Simplifier
{
public:
    Expression run(const Expression& e) { return to_expr(to_poly(e)); }

private:
    std::unordered_map<const detail::Node*, Poly> memo_;
    // keep inputs alive while their node pointers key the memo table
    std::vector<Expression> pinned_;

    // -- poly arithmetic ----------------------------------------------------

    Poly mul_monomials(const Monomial& a, const Monomial& b)
    {
        Monomial m;
        m.reserve(a.size() + b.size());
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size()) {
                m.push_back(a[i++]);
            } else if (i == a.size()) {
                m.push_back(b[j++]);
            } else if (a[i].atom == b[j].atom) {
                const int e = a[i].exp + b[j].exp;
                if (e != 0) m.push_back(Factor{a[i].atom, e});
                ++i;
                ++j;
            } else if (atom_less(a[i].atom, b[j].atom)) {
                m.push_back(a[i++]);
            } else {
                m.push_back(b[j++]);
            }
        }
        return reduce_sqrt_powers(std::move(m));
    }

    // sqrt(u)^e -> u^q * sqrt(u)^r with e = 2q + r, r in {0,1}
    Poly reduce_sqrt_powers(Monomial m)
    {
        Poly extra = constant_poly(1.0);
        bool changed = false;
        Monomial kept;
        kept.reserve(m.size());
        for (auto& f : m) {
            if (is_sqrt_atom(f.atom) && f.exp != 1) {
                const int q = f.exp >= 0 ? f.exp / 2 : -((-f.exp + 1) / 2);
                const int r = f.exp - 2 * q;
                if (q != 0) {
                    extra = mul(extra, power(to_poly(f.atom.arg()), q));
                    changed = true;
                }
                if (r != 0) kept.push_back(Factor{f.atom, r});
            } else {
                kept.push_back(f);
            }
        }
        Poly out;
        if (!changed) {
            out.emplace(std::move(kept), 1.0);
            return out;
        }
        Poly base;
        base.emplace(std::move(kept), 1.0);
        return mul(base, extra);
    }

    Poly mul(const Poly& a, const Poly& b)
    {
        if (a.empty() || b.empty()) return {};
        if (a.size() * b.size() > kExpansionCap) {
            // too large to expand: keep the bigger factor as an opaque atom
            const bool a_big = a.size() >= b.size();
            const Poly& big = a_big ? a : b;
            const Poly& small = a_big ? b : a;
            return mul(small, sum_atom_power(big, 1));
        }
        Poly out;
        for (const auto& [ma, ca] : a) {
            for (const auto& [mb, cb] : b) {
                if (ma.empty()) {
                    add_term(out, mb, ca * cb);
                } else if (mb.empty()) {
                    add_term(out, ma, ca * cb);
                } else {
                    const Poly prod = mul_monomials(ma, mb);
                    add_into(out, prod, ca * cb);
                }
            }
        }
        return out;
    }

    /// p^k for a multi-term p, kept as a normalized atom.
    Poly sum_atom_power(const Poly& p, int k)
    {
        const double lead = p.begin()->second;
        Poly normalized;
        for (const auto& [m, c] : p) normalized.emplace(m, c / lead);
        const Expression atom = to_expr(normalized);
        Poly out;
        out.emplace(Monomial{Factor{atom, k}}, std::pow(lead, k));
        return out;
    }

    Poly inverse(const Poly& p)
    {
        if (p.empty()) {
            // 1/0 stays symbolic; evaluation reports the domain error
            return atom_poly(Expression::make_binary(BinaryOp::div, constant(1.0), constant(0.0)));
        }
        if (p.size() == 1) {
            const auto& [m, c] = *p.begin();
            Monomial inv = m;
            for (auto& f : inv) f.exp = -f.exp;
            Poly r = reduce_sqrt_powers(std::move(inv));
            Poly out;
            add_into(out, r, 1.0 / c);
            return out;
        }
        return sum_atom_power(p, -1);
    }

    Poly power(const Poly& p, int k)
    {
        if (k == 0) return constant_poly(1.0);
        if (k < 0) return power(inverse(p), -k);
        if (p.size() == 1) {
            const auto& [m, c] = *p.begin();
            Monomial mk = m;
            for (auto& f : mk) f.exp *= k;
            Poly r = reduce_sqrt_powers(std::move(mk));
            Poly out;
            add_into(out, r, std::pow(c, k));
            return out;
        }
        Poly result = constant_poly(1.0);
        Poly base = p;
        int e = k;
        while (e > 0) {
            if (e & 1) result = mul(result, base);
            e >>= 1;
            if (e > 0) base = mul(base, base);
        }
        return result;
    }

    static bool proportional(const Poly& a, const Poly& b, double& ratio)
    {
        if (a.size() != b.size() || a.empty()) return false;
        auto ia = a.begin();
        auto ib = b.begin();
        ratio = ia->second / ib->second;
        for (; ia != a.end(); ++ia, ++ib) {
            if (MonomialLess{}(ia->first, ib->first) || MonomialLess{}(ib->first, ia->first)) return false;
            if (std::abs(ia->second - ratio * ib->second) > 1e-14 * std::abs(ia->second)) return false;
        }
        return true;
    }

    Poly divide(const Poly& a, const Poly& b)
    {
        double ratio = 0.0;
        if (b.size() > 1 && proportional(a, b, ratio)) return constant_poly(ratio);
        return mul(a, inverse(b));
    }

    // -- conversion ---------------------------------------------------------

    Poly function_poly(UnaryOp op, const Expression& raw_arg)
    {
        const Poly arg_poly = to_poly(raw_arg);
        if (arg_poly.empty() || (arg_poly.size() == 1 && arg_poly.begin()->first.empty())) {
            const double v = arg_poly.empty() ? 0.0 : arg_poly.begin()->second;
            switch (op) {
            case UnaryOp::sqrt:
                if (v >= 0.0) return constant_poly(std::sqrt(v));
                break;
            case UnaryOp::sin: return constant_poly(std::sin(v));
            case UnaryOp::cos: return constant_poly(std::cos(v));
            case UnaryOp::exp: return constant_poly(std::exp(v));
            case UnaryOp::log:
                if (v > 0.0) return constant_poly(std::log(v));
                break;
            case UnaryOp::abs: return constant_poly(std::abs(v));
            case UnaryOp::neg: return constant_poly(-v);
            }
        }
        const Expression arg = to_expr(arg_poly);
        if (op == UnaryOp::abs) {
            if (arg.kind() == NodeKind::unary &&
                (arg.unary_op() == UnaryOp::abs || arg.unary_op() == UnaryOp::sqrt || arg.unary_op() == UnaryOp::exp))
                return arg_poly;
            if (arg_poly.size() == 1) {
                const auto& [m, c] = *arg_poly.begin();
                const bool even = std::all_of(m.begin(), m.end(), [](const Factor& f) { return f.exp % 2 == 0; });
                if (even) {
                    Poly out;
                    out.emplace(m, std::abs(c));
                    return out;
                }
            }
        }
        if (op == UnaryOp::log && arg.kind() == NodeKind::unary && arg.unary_op() == UnaryOp::exp)
            return to_poly(arg.arg());
        return atom_poly(Expression::make_unary(op, arg));
    }

    Poly to_poly(const Expression& e)
    {
        if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
        Poly result;
        switch (e.kind()) {
        case NodeKind::constant: result = constant_poly(e.value()); break;
        case NodeKind::variable: result = atom_poly(e); break;
        case NodeKind::unary:
            if (e.unary_op() == UnaryOp::neg) {
                add_into(result, to_poly(e.arg()), -1.0);
            } else {
                result = function_poly(e.unary_op(), e.arg());
            }
            break;
        case NodeKind::binary:
            switch (e.binary_op()) {
            case BinaryOp::add:
                result = to_poly(e.lhs());
                add_into(result, to_poly(e.rhs()), 1.0);
                break;
            case BinaryOp::sub:
                result = to_poly(e.lhs());
                add_into(result, to_poly(e.rhs()), -1.0);
                break;
            case BinaryOp::mul: result = mul(to_poly(e.lhs()), to_poly(e.rhs())); break;
            case BinaryOp::div: result = divide(to_poly(e.lhs()), to_poly(e.rhs())); break;
            case BinaryOp::pow: result = power(to_poly(e.lhs()), e.exponent()); break;
            }
            break;
        }
        if (e.node_count() > 1) {
            pinned_.push_back(e);
            memo_.emplace(e.node(), result);
        }
        return result;
    }

    static Expression factor_expr(const Factor& f)
    {
        const int k = std::abs(f.exp);
        return k == 1 ? f.atom : Expression::make_binary(BinaryOp::pow, f.atom, constant(static_cast<double>(k)));
    }

    static bool factor_order(const Factor& a, const Factor& b)
    {
        const int c = compare(a.atom, b.atom);
        if (c != 0) return c < 0;
        return a.exp < b.exp;
    }

    static Expression product(const std::vector<Factor>& fs)
    {
        Expression acc;
        bool first = true;
        for (const auto& f : fs) {
            const Expression fe = factor_expr(f);
            acc = first ? fe : Expression::make_binary(BinaryOp::mul, acc, fe);
            first = false;
        }
        return acc;
    }

    // Builds c·num/den with |c|; the sign is handled by the caller.
    static Expression term_expr(const Monomial& m, double abs_c)
    {
        std::vector<Factor> num;
        std::vector<Factor> den;
        for (const auto& f : m) (f.exp > 0 ? num : den).push_back(f);
        std::sort(num.begin(), num.end(), factor_order);
        std::sort(den.begin(), den.end(), factor_order);
        Expression out;
        if (num.empty()) {
            out = constant(abs_c);
        } else {
            out = product(num);
            if (abs_c != 1.0) out = Expression::make_binary(BinaryOp::mul, constant(abs_c), out);
        }
        if (!den.empty()) out = Expression::make_binary(BinaryOp::div, out, product(den));
        return out;
    }

    static bool monomial_order(const std::pair<Monomial, double>& a, const std::pair<Monomial, double>& b)
    {
        // lower total degree first, then structural order of the factors
        auto degree = [](const Monomial& m) {
            int d = 0;
            for (const auto& f : m) d += std::abs(f.exp);
            return d;
        };
        const int da = degree(a.first);
        const int db = degree(b.first);
        if (da != db) return da < db;
        std::vector<Factor> fa = a.first;
        std::vector<Factor> fb = b.first;
        std::sort(fa.begin(), fa.end(), factor_order);
        std::sort(fb.begin(), fb.end(), factor_order);
        const std::size_t n = std::min(fa.size(), fb.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (int c = compare(fa[i].atom, fb[i].atom); c != 0) return c < 0;
            if (fa[i].exp != fb[i].exp) return fa[i].exp < fb[i].exp;
        }
        return fa.size() < fb.size();
    }

    static Expression to_expr(const Poly& p)
    {
        if (p.empty()) return constant(0.0);
        std::vector<std::pair<Monomial, double>> terms(p.begin(), p.end());
        std::sort(terms.begin(), terms.end(), monomial_order);
        Expression acc;
        bool first = true;
        for (const auto& [m, c] : terms) {
            if (m.empty()) {
                const Expression k = constant(first ? c : std::abs(c));
                acc = first ? k : Expression::make_binary(c < 0 ? BinaryOp::sub : BinaryOp::add, acc, k);
                first = false;
                continue;
            }
            const Expression t = term_expr(m, std::abs(c));
            if (first)
                acc = c < 0 ? Expression::make_unary(UnaryOp::neg, t) : t;
            else
                acc = Expression::make_binary(c < 0 ? BinaryOp::sub : BinaryOp::add, acc, t);
            first = false;
        }
        return acc;
    }
};

} // namespace

Expression simplify(const Expression& e)
{
    Simplifier s;
    return s.run(e);
}

} // namespace spraylab
