#include "spraylab/calculus.hpp"

#include <algorithm>
#include <stdexcept>

namespace spraylab {

namespace {

void check_dim(int a, int b, const char* what)
{
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Sorts slots in place; returns the permutation sign, or 0 on a repeat.
int sort_with_sign(MultiIndex& s)
{
    int sign = 1;
    for (std::size_t i = 1; i < s.size(); ++i) {
        for (std::size_t j = i; j > 0 && s[j - 1] >= s[j]; --j) {
            if (s[j - 1] == s[j]) return 0;
            std::swap(s[j - 1], s[j]);
            sign = -sign;
        }
    }
    return sign;
}

// All strictly increasing tuples of length k over 0..m-1.
std::vector<MultiIndex> increasing_tuples(int m, int k)
{
    std::vector<MultiIndex> out;
    if (k < 0 || k > m) return out;
    MultiIndex cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
    for (;;) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

struct Shuffle
{
    MultiIndex head; // first l entries, increasing
    MultiIndex tail; // the rest, increasing
    int sign;
};

// (l, |I|-l)-shuffles of an increasing tuple.
std::vector<Shuffle> shuffles(const MultiIndex& I, int l)
{
    std::vector<Shuffle> out;
    const int m = static_cast<int>(I.size());
    for (const auto& pick : increasing_tuples(m, l)) {
        Shuffle s;
        std::vector<bool> in_head(static_cast<std::size_t>(m), false);
        for (int p : pick) in_head[static_cast<std::size_t>(p)] = true;
        // sign = (-1)^(number of (tail, head) inversions)
        int inversions = 0;
        int tails_seen = 0;
        for (int i = 0; i < m; ++i) {
            if (in_head[static_cast<std::size_t>(i)]) {
                s.head.push_back(I[static_cast<std::size_t>(i)]);
                inversions += tails_seen;
            } else {
                s.tail.push_back(I[static_cast<std::size_t>(i)]);
                ++tails_seen;
            }
        }
        s.sign = inversions % 2 == 0 ? 1 : -1;
        out.push_back(std::move(s));
    }
    return out;
}

Expression signed_term(int sign, const Expression& e) { return sign > 0 ? e : -e; }

// Accumulates terms per index and emits simplified, nonzero entries.
class Accumulator
{
public:
    void add(const MultiIndex& I, Expression term) { terms_[I].push_back(std::move(term)); }

    void emit_into(ScalarForm& w)
    {
        for (auto& [I, ts] : terms_) w.set(I, simplify(sum(ts)));
    }

private:
    std::map<MultiIndex, std::vector<Expression>> terms_;
};

} // namespace

Variable slot_variable(int n, int slot)
{
    if (slot < 0 || slot >= 2 * n) throw std::out_of_range("slot_variable: slot out of range");
    return slot < n ? Variable{VarKind::base, slot + 1} : Variable{VarKind::fiber, slot - n + 1};
}

int variable_slot(int n, Variable v) { return v.kind == VarKind::base ? v.index - 1 : n + v.index - 1; }

std::string slot_name(int n, int slot)
{
    const Variable v = slot_variable(n, slot);
    return (v.kind == VarKind::base ? "x" : "y") + std::to_string(v.index);
}

std::string index_label(int n, const MultiIndex& slots)
{
    if (slots.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i) out += '^';
        out += 'd' + slot_name(n, slots[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ScalarForm

ScalarForm::ScalarForm(int n, int degree) : n_(n), degree_(degree)
{
    if (n < 1) throw std::invalid_argument("ScalarForm: dimension must be >= 1");
    if (degree < 0 || degree > 2 * n) throw std::invalid_argument("ScalarForm: degree out of range");
}

ScalarForm ScalarForm::function(int n, Expression f)
{
    ScalarForm w(n, 0);
    w.set({}, simplify(f));
    return w;
}

ScalarForm ScalarForm::coordinate_differential(int n, int slot)
{
    ScalarForm w(n, 1);
    w.set({slot}, constant(1.0));
    return w;
}

Expression ScalarForm::at(const MultiIndex& slots) const
{
    if (static_cast<int>(slots.size()) != degree_) throw std::invalid_argument("ScalarForm::at: wrong number of arguments");
    MultiIndex s = slots;
    const int sign = sort_with_sign(s);
    if (sign == 0) return {};
    auto it = comps_.find(s);
    if (it == comps_.end()) return {};
    return signed_term(sign, it->second);
}

void ScalarForm::set(const MultiIndex& slots, const Expression& value)
{
    if (static_cast<int>(slots.size()) != degree_) throw std::invalid_argument("ScalarForm::set: wrong number of arguments");
    MultiIndex s = slots;
    for (int a : s)
        if (a < 0 || a >= 2 * n_) throw std::out_of_range("ScalarForm::set: slot out of range");
    const int sign = sort_with_sign(s);
    if (sign == 0) {
        if (!value.is_constant(0.0)) throw std::invalid_argument("ScalarForm::set: repeated slot with nonzero value");
        return;
    }
    if (value.is_constant(0.0))
        comps_.erase(s);
    else
        comps_[s] = signed_term(sign, value);
}

void ScalarForm::add(const MultiIndex& slots, const Expression& value) { set(slots, simplify(at(slots) + value)); }

bool ScalarForm::is_semi_basic() const
{
    return std::all_of(comps_.begin(), comps_.end(), [&](const auto& kv) {
        return std::all_of(kv.first.begin(), kv.first.end(), [&](int a) { return a < n_; });
    });
}

ScalarForm ScalarForm::simplified() const
{
    ScalarForm out(n_, degree_);
    for (const auto& [I, e] : comps_) out.set(I, simplify(e));
    return out;
}

std::map<MultiIndex, double> ScalarForm::evaluate(const Point& p) const
{
    std::map<MultiIndex, double> out;
    for (const auto& [I, e] : comps_) out[I] = eval(e, p);
    return out;
}

ScalarForm operator+(const ScalarForm& a, const ScalarForm& b)
{
    check_dim(a.n_, b.n_, "ScalarForm +");
    if (a.degree_ != b.degree_) throw std::invalid_argument("ScalarForm +: degree mismatch");
    ScalarForm out = a;
    for (const auto& [I, e] : b.comps_) out.add(I, e);
    return out;
}

ScalarForm operator-(const ScalarForm& a, const ScalarForm& b) { return a + constant(-1.0) * b; }

ScalarForm operator*(const Expression& f, const ScalarForm& a)
{
    ScalarForm out(a.n_, a.degree_);
    for (const auto& [I, e] : a.comps_) out.set(I, simplify(f * e));
    return out;
}

// ---------------------------------------------------------------------------
// VectorValuedForm

VectorValuedForm::VectorValuedForm(int n, int degree)
    : n_(n), degree_(degree), comps_(static_cast<std::size_t>(2 * n), ScalarForm(n, degree))
{
}

VectorValuedForm VectorValuedForm::vector_field(int n, std::span<const Expression> components)
{
    if (static_cast<int>(components.size()) != 2 * n) throw std::invalid_argument("vector_field: need 2n components");
    VectorValuedForm X(n, 0);
    for (int b = 0; b < 2 * n; ++b) X.component(b).set({}, simplify(components[static_cast<std::size_t>(b)]));
    return X;
}

bool VectorValuedForm::empty() const
{
    return std::all_of(comps_.begin(), comps_.end(), [](const ScalarForm& w) { return w.empty(); });
}

bool VectorValuedForm::is_semi_basic() const
{
    for (int b = 0; b < 2 * n_; ++b) {
        const ScalarForm& w = component(b);
        if (b < n_ && !w.empty()) return false;
        if (!w.is_semi_basic()) return false;
    }
    return true;
}

bool VectorValuedForm::is_almost_semi_basic() const
{
    for (int b = 0; b < 2 * n_; ++b) {
        const ScalarForm& w = component(b);
        if (!w.is_semi_basic()) return false;
        if (b < n_)
            for (const auto& [I, e] : w.components())
                if (depends_on(e, VarKind::fiber)) return false;
    }
    return true;
}

VectorValuedForm VectorValuedForm::simplified() const
{
    VectorValuedForm out(n_, degree_);
    for (int b = 0; b < 2 * n_; ++b) out.component(b) = component(b).simplified();
    return out;
}

VectorValuedForm operator+(const VectorValuedForm& a, const VectorValuedForm& b)
{
    check_dim(a.n_, b.n_, "VectorValuedForm +");
    if (a.degree_ != b.degree_) throw std::invalid_argument("VectorValuedForm +: degree mismatch");
    VectorValuedForm out(a.n_, a.degree_);
    for (int s = 0; s < 2 * a.n_; ++s) out.component(s) = a.component(s) + b.component(s);
    return out;
}

VectorValuedForm operator-(const VectorValuedForm& a, const VectorValuedForm& b) { return a + constant(-1.0) * b; }

VectorValuedForm operator*(const Expression& f, const VectorValuedForm& a)
{
    VectorValuedForm out(a.n_, a.degree_);
    for (int s = 0; s < 2 * a.n_; ++s) out.component(s) = f * a.component(s);
    return out;
}

// ---------------------------------------------------------------------------
// Standard objects

VectorValuedForm identity_form(int n)
{
    VectorValuedForm id(n, 1);
    for (int a = 0; a < 2 * n; ++a) id.component(a).set({a}, constant(1.0));
    return id;
}

VectorValuedForm vertical_endomorphism(int n)
{
    VectorValuedForm J(n, 1);
    for (int i = 0; i < n; ++i) J.component(n + i).set({i}, constant(1.0));
    return J;
}

VectorValuedForm liouville(int n)
{
    std::vector<Expression> c(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(n + i)] = y(i + 1);
    return VectorValuedForm::vector_field(n, c);
}

// ---------------------------------------------------------------------------
// Operations

ScalarForm exterior_d(const ScalarForm& w)
{
    const int n = w.dim();
    if (w.degree() == 2 * n) return ScalarForm(n, w.degree());
    ScalarForm out(n, w.degree() + 1);
    Accumulator acc;
    for (const auto& [I, e] : w.components()) {
        for (int c = 0; c < 2 * n; ++c) {
            if (std::find(I.begin(), I.end(), c) != I.end()) continue;
            const Expression de = diff(e, slot_variable(n, c));
            if (de.is_constant(0.0)) continue;
            const auto pos = std::lower_bound(I.begin(), I.end(), c) - I.begin();
            MultiIndex target = I;
            target.insert(target.begin() + pos, c);
            acc.add(target, signed_term(pos % 2 == 0 ? 1 : -1, de));
        }
    }
    acc.emit_into(out);
    return out;
}

ScalarForm wedge(const ScalarForm& a, const ScalarForm& b)
{
    check_dim(a.dim(), b.dim(), "wedge");
    const int n = a.dim();
    const int deg = a.degree() + b.degree();
    if (deg > 2 * n) throw std::invalid_argument("wedge: degree exceeds 2n");
    ScalarForm out(n, deg);
    Accumulator acc;
    for (const auto& [I, ea] : a.components()) {
        for (const auto& [J, eb] : b.components()) {
            MultiIndex K = I;
            K.insert(K.end(), J.begin(), J.end());
            const int sign = sort_with_sign(K);
            if (sign == 0) continue;
            acc.add(K, signed_term(sign, ea * eb));
        }
    }
    acc.emit_into(out);
    return out;
}

ScalarForm inner_product(const VectorValuedForm& L, const ScalarForm& w)
{
    check_dim(L.dim(), w.dim(), "inner_product");
    const int n = w.dim();
    const int l = L.degree();
    const int k = w.degree();
    if (k == 0) return ScalarForm(n, std::max(l - 1, 0));
    const int deg = k + l - 1;
    if (deg > 2 * n) throw std::invalid_argument("inner_product: degree exceeds 2n");
    ScalarForm out(n, deg);
    if (w.empty() || L.empty()) return out;
    Accumulator acc;
    for (const auto& I : increasing_tuples(2 * n, deg)) {
        for (const auto& sh : shuffles(I, l)) {
            for (int b = 0; b < 2 * n; ++b) {
                const Expression lb = L.at(b, sh.head);
                if (lb.is_constant(0.0)) continue;
                MultiIndex args{b};
                args.insert(args.end(), sh.tail.begin(), sh.tail.end());
                const Expression wb = w.at(args);
                if (wb.is_constant(0.0)) continue;
                acc.add(I, signed_term(sh.sign, lb * wb));
            }
        }
    }
    acc.emit_into(out);
    return out;
}

VectorValuedForm inner_product(const VectorValuedForm& K, const VectorValuedForm& L)
{
    check_dim(K.dim(), L.dim(), "inner_product");
    const int n = L.dim();
    const int deg = L.degree() == 0 ? 0 : K.degree() + L.degree() - 1;
    VectorValuedForm out(n, deg);
    if (L.degree() == 0) return out;
    for (int b = 0; b < 2 * n; ++b) out.component(b) = inner_product(K, L.component(b));
    return out;
}

ScalarForm lie_type_derivative(const VectorValuedForm& L, const ScalarForm& w)
{
    check_dim(L.dim(), w.dim(), "lie_type_derivative");
    const int n = w.dim();
    const int l = L.degree();
    const int deg = w.degree() + l;
    if (deg > 2 * n) throw std::invalid_argument("lie_type_derivative: degree exceeds 2n");
    ScalarForm first = inner_product(L, exterior_d(w));
    if (w.degree() == 0) return first;
    ScalarForm second = exterior_d(inner_product(L, w));
    return l % 2 == 0 ? first + second : first - second;
}

ScalarForm lie_derivative(const VectorValuedForm& X, const ScalarForm& w)
{
    if (X.degree() != 0) throw std::invalid_argument("lie_derivative: expects a vector field");
    return lie_type_derivative(X, w);
}

VectorValuedForm fn_bracket(const VectorValuedForm& L, const VectorValuedForm& K)
{
    check_dim(L.dim(), K.dim(), "fn_bracket");
    const int n = L.dim();
    const int l = L.degree();
    const int k = K.degree();
    if (k + l > 2 * n) throw std::invalid_argument("fn_bracket: degree exceeds 2n");
    VectorValuedForm out(n, k + l);
    const bool sign_flip = (k * l) % 2 == 1;
    for (int b = 0; b < 2 * n; ++b) {
        const ScalarForm a = lie_type_derivative(L, K.component(b));
        const ScalarForm c = lie_type_derivative(K, L.component(b));
        out.component(b) = sign_flip ? a + c : a - c;
    }
    return out;
}

VectorValuedForm compose(const VectorValuedForm& L, const VectorValuedForm& K)
{
    check_dim(L.dim(), K.dim(), "compose");
    if (L.degree() != 1) throw std::invalid_argument("compose: left factor must be a vector-valued 1-form");
    const int n = L.dim();
    VectorValuedForm out(n, K.degree());
    for (int b = 0; b < 2 * n; ++b) {
        Accumulator acc;
        for (int c = 0; c < 2 * n; ++c) {
            const Expression lbc = L.at(b, {c});
            if (lbc.is_constant(0.0)) continue;
            for (const auto& [I, e] : K.component(c).components()) acc.add(I, lbc * e);
        }
        acc.emit_into(out.component(b));
    }
    return out;
}

VectorValuedForm wedge(const ScalarForm& a, const VectorValuedForm& L)
{
    check_dim(a.dim(), L.dim(), "wedge");
    const int n = L.dim();
    VectorValuedForm out(n, a.degree() + L.degree());
    for (int b = 0; b < 2 * n; ++b) out.component(b) = wedge(a, L.component(b));
    return out;
}

VectorValuedForm build_combination(const ScalarForm& first, const ScalarForm& second, CombinationPattern pattern)
{
    const int n = first.dim();
    switch (pattern) {
    case CombinationPattern::alpha_wedge_j:
        if (first.degree() + 1 > 2 * n) throw std::invalid_argument("build_combination: degree mismatch for α∧J");
        return wedge(first, vertical_endomorphism(n));
    case CombinationPattern::beta_tensor_c: {
        VectorValuedForm out(n, first.degree());
        for (int i = 0; i < n; ++i) out.component(n + i) = y(i + 1) * first;
        return out;
    }
    case CombinationPattern::lambda_j_plus_eta_tensor_c: {
        check_dim(n, second.dim(), "build_combination");
        if (first.degree() != 0 || second.degree() != 1)
            throw std::invalid_argument("build_combination: λJ + η⊗ℂ needs a 0-form λ and a 1-form η");
        const Expression lambda = first.value();
        VectorValuedForm out = lambda * vertical_endomorphism(n);
        for (int i = 0; i < n; ++i) out.component(n + i) = out.component(n + i) + y(i + 1) * second;
        return out;
    }
    }
    throw std::invalid_argument("build_combination: unknown pattern");
}

ZeroVerdict is_zero(const ScalarForm& w, std::span<const Point> samples, double tol)
{
    std::vector<ZeroVerdict> parts;
    for (const auto& [I, e] : w.components()) parts.push_back(is_zero(e, samples, tol));
    return combine(parts);
}

ZeroVerdict is_zero(const VectorValuedForm& L, std::span<const Point> samples, double tol)
{
    std::vector<ZeroVerdict> parts;
    for (int b = 0; b < 2 * L.dim(); ++b) parts.push_back(is_zero(L.component(b), samples, tol));
    return combine(parts);
}

} // namespace spraylab
