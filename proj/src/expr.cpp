#include "spraylab/expr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace spraylab {

namespace detail {

struct Node
{
    NodeKind kind = NodeKind::constant;
    double value = 0.0;
    Variable var{};
    UnaryOp uop = UnaryOp::neg;
    BinaryOp bop = BinaryOp::add;
    std::vector<Expression> children;
    std::size_t hash = 0;
    std::size_t size = 1;
};

} // namespace detail

namespace {

std::size_t mix(std::size_t seed, std::size_t v)
{
    // splitmix-style combine; deterministic across runs and platforms
    std::uint64_t z = seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
}

std::size_t hash_double(double v)
{
    if (v == 0.0) v = 0.0; // fold -0 into +0
    return static_cast<std::size_t>(std::bit_cast<std::uint64_t>(v));
}

const Expression& zero_expr()
{
    static const Expression z = Expression::constant(0.0);
    return z;
}

} // namespace

Expression::Expression() : Expression(zero_expr()) {}

Expression::Expression(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value)
{
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::constant;
    n->value = value == 0.0 ? 0.0 : value;
    n->hash = mix(1, hash_double(n->value));
    return Expression(std::move(n));
}

Expression Expression::variable(Variable v)
{
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::variable;
    n->var = v;
    n->hash = mix(2, static_cast<std::size_t>(v.kind == VarKind::base ? 0 : 1) * 1000003u + static_cast<std::size_t>(v.index));
    return Expression(std::move(n));
}

Expression Expression::make_unary(UnaryOp op, Expression a)
{
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::unary;
    n->uop = op;
    n->hash = mix(mix(3, static_cast<std::size_t>(op)), a.hash());
    n->size = 1 + a.node_count();
    n->children.push_back(std::move(a));
    return Expression(std::move(n));
}

Expression Expression::make_binary(BinaryOp op, Expression l, Expression r)
{
    if (op == BinaryOp::pow) {
        if (!r.is_constant() || r.value() != std::trunc(r.value()) || std::abs(r.value()) > 1e9)
            throw std::invalid_argument("pow exponent must be an integer constant");
    }
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::binary;
    n->bop = op;
    n->hash = mix(mix(mix(4, static_cast<std::size_t>(op)), l.hash()), r.hash());
    n->size = 1 + l.node_count() + r.node_count();
    n->children.push_back(std::move(l));
    n->children.push_back(std::move(r));
    return Expression(std::move(n));
}

NodeKind Expression::kind() const { return node_->kind; }
bool Expression::is_constant(double v) const { return is_constant() && node_->value == v; }
double Expression::value() const { return node_->value; }
Variable Expression::var() const { return node_->var; }
UnaryOp Expression::unary_op() const { return node_->uop; }
BinaryOp Expression::binary_op() const { return node_->bop; }
int Expression::exponent() const { return static_cast<int>(node_->children[1].value()); }
const Expression& Expression::arg() const { return node_->children[0]; }
const Expression& Expression::lhs() const { return node_->children[0]; }
const Expression& Expression::rhs() const { return node_->children[1]; }
std::size_t Expression::hash() const { return node_->hash; }
std::size_t Expression::node_count() const { return node_->size; }

int compare(const Expression& a, const Expression& b)
{
    if (a.node_ == b.node_) return 0;
    const auto& na = *a.node_;
    const auto& nb = *b.node_;
    if (na.kind != nb.kind) return na.kind < nb.kind ? -1 : 1;
    switch (na.kind) {
    case NodeKind::constant:
        if (na.value == nb.value) return 0;
        return na.value < nb.value ? -1 : 1;
    case NodeKind::variable:
        if (na.var.kind != nb.var.kind) return na.var.kind < nb.var.kind ? -1 : 1;
        if (na.var.index != nb.var.index) return na.var.index < nb.var.index ? -1 : 1;
        return 0;
    case NodeKind::unary:
        if (na.uop != nb.uop) return na.uop < nb.uop ? -1 : 1;
        return compare(na.children[0], nb.children[0]);
    case NodeKind::binary:
        if (na.bop != nb.bop) return na.bop < nb.bop ? -1 : 1;
        if (int c = compare(na.children[0], nb.children[0]); c != 0) return c;
        return compare(na.children[1], nb.children[1]);
    }
    return 0;
}

bool operator==(const Expression& a, const Expression& b)
{
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.node_count() != b.node_count()) return false;
    return compare(a, b) == 0;
}

Expression x(int i) { return Expression::variable({VarKind::base, i}); }
Expression y(int i) { return Expression::variable({VarKind::fiber, i}); }
Expression constant(double v) { return Expression::constant(v); }

// ---------------------------------------------------------------------------
// Folding constructors
// ---------------------------------------------------------------------------

namespace {

bool is_neg(const Expression& e) { return e.kind() == NodeKind::unary && e.unary_op() == UnaryOp::neg; }

} // namespace

Expression operator+(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) return constant(a.value() + b.value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (is_neg(b)) return a - b.arg();
    return Expression::make_binary(BinaryOp::add, a, b);
}

Expression operator-(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) return constant(a.value() - b.value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    if (is_neg(b)) return a + b.arg();
    return Expression::make_binary(BinaryOp::sub, a, b);
}

Expression operator-(const Expression& a)
{
    if (a.is_constant()) return constant(-a.value());
    if (is_neg(a)) return a.arg();
    return Expression::make_unary(UnaryOp::neg, a);
}

Expression operator*(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) return constant(a.value() * b.value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    if (is_neg(a) && is_neg(b)) return a.arg() * b.arg();
    if (is_neg(a)) return -(a.arg() * b);
    if (is_neg(b)) return -(a * b.arg());
    return Expression::make_binary(BinaryOp::mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant() && b.value() != 0.0) return constant(a.value() / b.value());
    if (a.is_constant(0.0)) return constant(0.0);
    if (b.is_constant(1.0)) return a;
    if (b.is_constant(-1.0)) return -a;
    if (is_neg(a)) return -(a.arg() / b);
    if (is_neg(b)) return -(a / b.arg());
    return Expression::make_binary(BinaryOp::div, a, b);
}

Expression pow(const Expression& base, int k)
{
    if (k == 0) return constant(1.0);
    if (k == 1) return base;
    if (base.is_constant() && !(base.value() == 0.0 && k < 0)) return constant(std::pow(base.value(), k));
    if (base.kind() == NodeKind::binary && base.binary_op() == BinaryOp::pow) {
        const long long combined = static_cast<long long>(base.exponent()) * k;
        if (std::llabs(combined) < (1LL << 30)) return pow(base.lhs(), static_cast<int>(combined));
    }
    return Expression::make_binary(BinaryOp::pow, base, constant(static_cast<double>(k)));
}

Expression sqrt(const Expression& a)
{
    if (a.is_constant() && a.value() >= 0.0) return constant(std::sqrt(a.value()));
    return Expression::make_unary(UnaryOp::sqrt, a);
}

Expression sin(const Expression& a)
{
    if (a.is_constant()) return constant(std::sin(a.value()));
    return Expression::make_unary(UnaryOp::sin, a);
}

Expression cos(const Expression& a)
{
    if (a.is_constant()) return constant(std::cos(a.value()));
    return Expression::make_unary(UnaryOp::cos, a);
}

Expression exp(const Expression& a)
{
    if (a.is_constant()) return constant(std::exp(a.value()));
    return Expression::make_unary(UnaryOp::exp, a);
}

Expression log(const Expression& a)
{
    if (a.is_constant() && a.value() > 0.0) return constant(std::log(a.value()));
    return Expression::make_unary(UnaryOp::log, a);
}

Expression abs(const Expression& a)
{
    if (a.is_constant()) return constant(std::abs(a.value()));
    if (a.kind() == NodeKind::unary && (a.unary_op() == UnaryOp::abs || a.unary_op() == UnaryOp::sqrt ||
                                         a.unary_op() == UnaryOp::exp))
        return a;
    return Expression::make_unary(UnaryOp::abs, a);
}

Expression sum(std::span<const Expression> terms)
{
    Expression acc = constant(0.0);
    for (const auto& t : terms) acc = acc + t;
    return acc;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

const char* function_name(UnaryOp op)
{
    switch (op) {
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::abs: return "abs";
    case UnaryOp::neg: return "-";
    }
    return "?";
}

// 1: sums, 2: products, 3: negation, 4: powers, 5: atoms
int precedence(const Expression& e)
{
    switch (e.kind()) {
    case NodeKind::constant: return e.value() < 0.0 ? 3 : 5;
    case NodeKind::variable: return 5;
    case NodeKind::unary: return e.unary_op() == UnaryOp::neg ? 3 : 5;
    case NodeKind::binary:
        switch (e.binary_op()) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
        }
    }
    return 5;
}

void format_number(std::string& out, double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

void print(std::string& out, const Expression& e);

void print_wrapped(std::string& out, const Expression& e, bool parens)
{
    if (parens) out.push_back('(');
    print(out, e);
    if (parens) out.push_back(')');
}

void print(std::string& out, const Expression& e)
{
    switch (e.kind()) {
    case NodeKind::constant: format_number(out, e.value()); return;
    case NodeKind::variable:
        out.push_back(e.var().kind == VarKind::base ? 'x' : 'y');
        out += std::to_string(e.var().index);
        return;
    case NodeKind::unary:
        if (e.unary_op() == UnaryOp::neg) {
            out.push_back('-');
            print_wrapped(out, e.arg(), precedence(e.arg()) < 4);
        } else {
            out += function_name(e.unary_op());
            print_wrapped(out, e.arg(), true);
        }
        return;
    case NodeKind::binary: {
        const int p = precedence(e);
        switch (e.binary_op()) {
        case BinaryOp::add:
        case BinaryOp::sub:
            print_wrapped(out, e.lhs(), precedence(e.lhs()) < 1);
            out += e.binary_op() == BinaryOp::add ? " + " : " - ";
            print_wrapped(out, e.rhs(), precedence(e.rhs()) <= 1);
            return;
        case BinaryOp::mul:
        case BinaryOp::div:
            print_wrapped(out, e.lhs(), precedence(e.lhs()) < 2);
            out += e.binary_op() == BinaryOp::mul ? "*" : "/";
            print_wrapped(out, e.rhs(), precedence(e.rhs()) <= p);
            return;
        case BinaryOp::pow:
            print_wrapped(out, e.lhs(), precedence(e.lhs()) < 5);
            out.push_back('^');
            out += std::to_string(e.exponent());
            return;
        }
    }
    }
}

} // namespace

std::string to_string(const Expression& e)
{
    std::string out;
    print(out, e);
    return out;
}

int max_index(const Expression& e)
{
    switch (e.kind()) {
    case NodeKind::constant: return 0;
    case NodeKind::variable: return e.var().index;
    case NodeKind::unary: return max_index(e.arg());
    case NodeKind::binary: return std::max(max_index(e.lhs()), max_index(e.rhs()));
    }
    return 0;
}

bool depends_on(const Expression& e, VarKind kind)
{
    switch (e.kind()) {
    case NodeKind::constant: return false;
    case NodeKind::variable: return e.var().kind == kind;
    case NodeKind::unary: return depends_on(e.arg(), kind);
    case NodeKind::binary: return depends_on(e.lhs(), kind) || depends_on(e.rhs(), kind);
    }
    return false;
}

bool depends_on(const Expression& e, Variable v)
{
    switch (e.kind()) {
    case NodeKind::constant: return false;
    case NodeKind::variable: return e.var() == v;
    case NodeKind::unary: return depends_on(e.arg(), v);
    case NodeKind::binary: return depends_on(e.lhs(), v) || depends_on(e.rhs(), v);
    }
    return false;
}

bool contains_abs(const Expression& e)
{
    switch (e.kind()) {
    case NodeKind::constant:
    case NodeKind::variable: return false;
    case NodeKind::unary: return e.unary_op() == UnaryOp::abs || contains_abs(e.arg());
    case NodeKind::binary: return contains_abs(e.lhs()) || contains_abs(e.rhs());
    }
    return false;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

Expression diff(const Expression& e, Variable v)
{
    if (!depends_on(e, v)) return constant(0.0);
    switch (e.kind()) {
    case NodeKind::constant: return constant(0.0);
    case NodeKind::variable: return constant(e.var() == v ? 1.0 : 0.0);
    case NodeKind::unary: {
        const Expression& a = e.arg();
        const Expression da = diff(a, v);
        switch (e.unary_op()) {
        case UnaryOp::neg: return -da;
        case UnaryOp::sqrt: return da / (constant(2.0) * e);
        case UnaryOp::sin: return cos(a) * da;
        case UnaryOp::cos: return -(sin(a) * da);
        case UnaryOp::exp: return e * da;
        case UnaryOp::log: return da / a;
        case UnaryOp::abs: return da * (a / e);
        }
        break;
    }
    case NodeKind::binary: {
        const Expression& a = e.lhs();
        const Expression& b = e.rhs();
        switch (e.binary_op()) {
        case BinaryOp::add: return diff(a, v) + diff(b, v);
        case BinaryOp::sub: return diff(a, v) - diff(b, v);
        case BinaryOp::mul: return diff(a, v) * b + a * diff(b, v);
        case BinaryOp::div: return diff(a, v) / b - a * diff(b, v) / pow(b, 2);
        case BinaryOp::pow: {
            const int k = e.exponent();
            return constant(static_cast<double>(k)) * pow(a, k - 1) * diff(a, v);
        }
        }
        break;
    }
    }
    return constant(0.0);
}

// ---------------------------------------------------------------------------
// Points and evaluation
// ---------------------------------------------------------------------------

double Point::fiber_norm() const
{
    double s = 0.0;
    for (double v : y) s += v * v;
    return std::sqrt(s);
}

double Point::coord(Variable v) const
{
    const auto& c = v.kind == VarKind::base ? x : y;
    if (v.index < 1 || v.index > static_cast<int>(c.size()))
        throw std::out_of_range("variable index out of range for point");
    return c[static_cast<std::size_t>(v.index - 1)];
}

Point Point::checked(std::vector<double> xs, std::vector<double> ys, double floor)
{
    if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("point: x and y must have the same positive size");
    Point p{std::move(xs), std::move(ys)};
    if (!(p.fiber_norm() >= floor)) throw std::invalid_argument("point: |y| is below the fiber floor (y = 0 is excluded)");
    return p;
}

namespace {

std::string describe_point(const Point& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "x=(";
    for (std::size_t i = 0; i < p.x.size(); ++i) os << (i ? "," : "") << p.x[i];
    os << ") y=(";
    for (std::size_t i = 0; i < p.y.size(); ++i) os << (i ? "," : "") << p.y[i];
    os << ")";
    return os.str();
}

[[noreturn]] void domain_error(const char* what, const Expression& e, const Point& p)
{
    throw EvalError(std::string(what) + " in '" + to_string(e) + "' at " + describe_point(p), to_string(e));
}

double eval_rec(const Expression& e, const Point& p)
{
    switch (e.kind()) {
    case NodeKind::constant: return e.value();
    case NodeKind::variable: return p.coord(e.var());
    case NodeKind::unary: {
        const double a = eval_rec(e.arg(), p);
        switch (e.unary_op()) {
        case UnaryOp::neg: return -a;
        case UnaryOp::sqrt:
            if (a < 0.0) domain_error("sqrt of a negative value", e, p);
            return std::sqrt(a);
        case UnaryOp::sin: return std::sin(a);
        case UnaryOp::cos: return std::cos(a);
        case UnaryOp::exp: return std::exp(a);
        case UnaryOp::log:
            if (!(a > 0.0)) domain_error("log of a non-positive value", e, p);
            return std::log(a);
        case UnaryOp::abs: return std::abs(a);
        }
        break;
    }
    case NodeKind::binary: {
        const double a = eval_rec(e.lhs(), p);
        switch (e.binary_op()) {
        case BinaryOp::add: return a + eval_rec(e.rhs(), p);
        case BinaryOp::sub: return a - eval_rec(e.rhs(), p);
        case BinaryOp::mul: return a * eval_rec(e.rhs(), p);
        case BinaryOp::div: {
            const double b = eval_rec(e.rhs(), p);
            if (b == 0.0) domain_error("division by zero", e, p);
            return a / b;
        }
        case BinaryOp::pow: {
            const int k = e.exponent();
            if (a == 0.0 && k < 0) domain_error("negative power of zero", e, p);
            return std::pow(a, k);
        }
        }
        break;
    }
    }
    return 0.0;
}

} // namespace

EvalError::EvalError(const std::string& message, std::string subexpression)
    : std::runtime_error(message), subexpression_(std::move(subexpression))
{
}

double eval(const Expression& e, const Point& p)
{
    const double v = eval_rec(e, p);
    if (!std::isfinite(v)) domain_error("non-finite value", e, p);
    return v;
}

// ---------------------------------------------------------------------------
// Zero testing and sampling
// ---------------------------------------------------------------------------

std::string to_string(ZeroLevel level)
{
    switch (level) {
    case ZeroLevel::symbolic_zero: return "symbolic_zero";
    case ZeroLevel::numeric_zero: return "numeric_zero";
    case ZeroLevel::nonzero: return "nonzero";
    }
    return "?";
}

ZeroVerdict is_zero(const Expression& e, std::span<const Point> samples, double tol)
{
    if (samples.empty()) throw std::invalid_argument("is_zero: sample list is empty");
    ZeroVerdict verdict;
    const Expression s = simplify(e);
    if (s.is_constant(0.0)) {
        verdict.level = ZeroLevel::symbolic_zero;
        return verdict;
    }
    std::optional<EvalError> last_error;
    for (const auto& p : samples) {
        double v = 0.0;
        try {
            v = eval(s, p);
        } catch (const EvalError& err) {
            ++verdict.skipped;
            last_error = err;
            continue;
        }
        ++verdict.evaluated;
        if (!verdict.witness || std::abs(v) > verdict.max_residual) {
            verdict.max_residual = std::abs(v);
            verdict.witness = p;
            verdict.witness_value = v;
        }
    }
    if (verdict.evaluated == 0) throw EvalError("is_zero: every sample raised a domain error: " + std::string(last_error->what()), last_error->subexpression());
    verdict.level = verdict.max_residual < tol ? ZeroLevel::numeric_zero : ZeroLevel::nonzero;
    return verdict;
}

ZeroVerdict combine(std::span<const ZeroVerdict> verdicts)
{
    ZeroVerdict out;
    for (const auto& v : verdicts) {
        if (static_cast<int>(v.level) > static_cast<int>(out.level)) out.level = v.level;
        if (v.witness && (!out.witness || v.max_residual > out.max_residual)) {
            out.max_residual = v.max_residual;
            out.witness = v.witness;
            out.witness_value = v.witness_value;
        }
        out.evaluated = std::max(out.evaluated, v.evaluated);
        out.skipped = std::max(out.skipped, v.skipped);
    }
    return out;
}

namespace {

// Platform-independent uniform [0,1) from a 64-bit engine.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng)
{
    double u1 = unit(rng);
    while (u1 <= 0.0) u1 = unit(rng);
    const double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace

std::vector<Point> sample_points(int n, int count, std::uint64_t seed)
{
    if (n < 1) throw std::invalid_argument("sample_points: n must be >= 1");
    std::mt19937_64 rng(seed);
    constexpr double r_min = 0.5;
    constexpr double r_max = 2.0;
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int s = 0; s < count; ++s) {
        Point p;
        p.x.resize(static_cast<std::size_t>(n));
        p.y.resize(static_cast<std::size_t>(n));
        for (auto& v : p.x) v = 2.0 * unit(rng) - 1.0;
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : p.y) {
                v = standard_normal(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        // radius distributed so that points are uniform in the annulus volume
        const double lo = std::pow(r_min, n);
        const double hi = std::pow(r_max, n);
        const double r = std::pow(lo + unit(rng) * (hi - lo), 1.0 / n);
        for (auto& v : p.y) v *= r / norm;
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace spraylab
