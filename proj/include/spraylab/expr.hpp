#pragma once

// Scalar expressions over the induced coordinates (x^1..x^n, y^1..y^n) of the
// slashed tangent bundle.  Expressions are immutable and cheap to copy; every
// operation below is a pure function.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spraylab {

enum class VarKind { base, fiber };

struct Variable
{
    VarKind kind = VarKind::base;
    int index = 1; // 1-based, as in x1, y2

    friend bool operator==(const Variable&, const Variable&) = default;
};

enum class UnaryOp { neg, sqrt, sin, cos, exp, log, abs };
enum class BinaryOp { add, sub, mul, div, pow };

enum class NodeKind { constant, variable, unary, binary };

namespace detail {
struct Node;
}

class Expression
{
public:
    /// The zero constant.
    Expression();

    static Expression constant(double value);
    static Expression variable(Variable v);

    // Raw node constructors: no folding.  The parser uses these so that the
    // AST mirrors the input text.
    static Expression make_unary(UnaryOp op, Expression arg);
    static Expression make_binary(BinaryOp op, Expression lhs, Expression rhs);

    NodeKind kind() const;
    bool is_constant() const { return kind() == NodeKind::constant; }
    bool is_constant(double v) const;
    double value() const;          // constant nodes
    Variable var() const;          // variable nodes
    UnaryOp unary_op() const;      // unary nodes
    BinaryOp binary_op() const;    // binary nodes
    int exponent() const;          // pow nodes
    const Expression& arg() const; // unary nodes
    const Expression& lhs() const; // binary nodes
    const Expression& rhs() const; // binary nodes

    std::size_t hash() const;
    std::size_t node_count() const;

    /// Structural equality.
    friend bool operator==(const Expression& a, const Expression& b);

    /// Total structural order, used for canonical term ordering.
    friend int compare(const Expression& a, const Expression& b);

    const detail::Node* node() const { return node_.get(); }

private:
    explicit Expression(std::shared_ptr<const detail::Node> node);
    std::shared_ptr<const detail::Node> node_;
};

Expression x(int i);
Expression y(int i);
Expression constant(double v);

// Folding constructors: constant arithmetic and 0/1 identities are applied
// on the fly so that derived expressions stay small.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, int exponent);
Expression sqrt(const Expression& a);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression abs(const Expression& a);

/// Sum of a list; the empty sum is 0.
Expression sum(std::span<const Expression> terms);

std::string to_string(const Expression& e);

/// Largest variable index used, 0 for constant expressions.
int max_index(const Expression& e);
bool depends_on(const Expression& e, VarKind kind);
bool depends_on(const Expression& e, Variable v);
/// True when an abs() node occurs anywhere in e.
bool contains_abs(const Expression& e);

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Parses the expression DSL.  Variables must satisfy 1 <= index <= n.
Expression parse(std::string_view text, int n);

// ---------------------------------------------------------------------------
// Calculus and evaluation
// ---------------------------------------------------------------------------

/// Exact partial derivative.  d|u| is written u'·u/|u|, so evaluating it at
/// u = 0 raises a domain error instead of returning a wrong value.
Expression diff(const Expression& e, Variable v);

/// Point of TM\{0}.
struct Point
{
    std::vector<double> x;
    std::vector<double> y;

    int dim() const { return static_cast<int>(x.size()); }
    double fiber_norm() const;
    double coord(Variable v) const;

    /// Throws std::invalid_argument if the sizes differ or |y| < floor.
    static Point checked(std::vector<double> x, std::vector<double> y, double floor = 1e-6);
};

class EvalError : public std::runtime_error
{
public:
    EvalError(const std::string& message, std::string subexpression);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

double eval(const Expression& e, const Point& p);

/// Canonicalizes e: constant folding, 0/1 identities, expansion of integer
/// powers, like-term cancellation over commutatively normalized monomials and
/// sqrt(u)^2 = u.  The result evaluates equal to e wherever e is defined.
Expression simplify(const Expression& e);

// ---------------------------------------------------------------------------
// Zero testing
// ---------------------------------------------------------------------------

enum class ZeroLevel { symbolic_zero, numeric_zero, nonzero };

struct ZeroVerdict
{
    ZeroLevel level = ZeroLevel::symbolic_zero;
    double max_residual = 0.0;          // max |value| over evaluated samples
    std::optional<Point> witness;       // worst sample
    double witness_value = 0.0;
    int evaluated = 0;
    int skipped = 0;                    // samples where eval raised a domain error

    bool is_zero() const { return level != ZeroLevel::nonzero; }
};

std::string to_string(ZeroLevel level);

/// Tri-state zero test.  Samples that raise a domain error are skipped; if
/// every sample is skipped an EvalError is thrown.
ZeroVerdict is_zero(const Expression& e, std::span<const Point> samples, double tol);

/// Folds a list of verdicts: the weakest level wins and residuals accumulate
/// by max.  An empty list is a symbolic zero.
ZeroVerdict combine(std::span<const ZeroVerdict> verdicts);

/// Deterministic sample points: x uniform in [-1,1]^n, y uniform on the
/// annulus 0.5 <= |y| <= 2.
std::vector<Point> sample_points(int n, int count, std::uint64_t seed = 42);

} // namespace spraylab
