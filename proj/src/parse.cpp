// Recursive-descent parser for the expression DSL:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' factor
//   ident  := ('x'|'y') positive-integer
//   func   := sqrt | sin | cos | exp | log | abs
//
// Unary minus takes a factor, so "-y1^2" means -(y1^2).  Exponents may carry
// a sign ("y1^-2") or be parenthesized ("y1^(-2)").

#include "spraylab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

namespace spraylab {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"), offset_(offset)
{
}

namespace {

class Parser
{
public:
    Parser(std::string_view text, int n) : text_(text), n_(n) {}

    Expression parse_all()
    {
        Expression e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    std::string_view text_;
    int n_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expression parse_expr()
    {
        Expression lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = Expression::make_binary(BinaryOp::add, lhs, parse_term());
            else if (accept('-'))
                lhs = Expression::make_binary(BinaryOp::sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    Expression parse_term()
    {
        Expression lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = Expression::make_binary(BinaryOp::mul, lhs, parse_factor());
            else if (accept('/'))
                lhs = Expression::make_binary(BinaryOp::div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    Expression parse_factor()
    {
        Expression base = parse_base();
        if (accept('^')) {
            const int k = parse_exponent();
            return Expression::make_binary(BinaryOp::pow, base, Expression::constant(static_cast<double>(k)));
        }
        return base;
    }

    int parse_exponent()
    {
        skip_ws();
        const std::size_t start = pos_;
        const bool parenthesized = accept('(');
        skip_ws();
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            negative = text_[pos_] == '-';
            ++pos_;
            skip_ws();
        }
        const std::size_t digits_start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits_start) {
            if (pos_ < text_.size() && (text_[pos_] == '.' || std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '('))
                fail_at("non-integer pow exponent", start);
            fail("expected an integer exponent");
        }
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
            fail_at("non-integer pow exponent", start);
        long long k = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + digits_start, text_.data() + pos_, k);
        if (ec != std::errc() || k > 1'000'000) fail_at("pow exponent out of range", start);
        if (parenthesized) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] != ')') fail_at("non-integer pow exponent", start);
            expect(')');
        }
        return static_cast<int>(negative ? -k : k);
    }

    Expression parse_base()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return Expression::make_unary(UnaryOp::neg, parse_factor());
        }
        if (c == '(') {
            ++pos_;
            Expression inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    Expression parse_number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return pos_ - s;
        };
        std::size_t count = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) fail_at("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail_at("malformed exponent in number", mark);
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v)) fail_at("malformed number", start);
        return Expression::constant(v);
    }

    Expression parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view word = text_.substr(start, pos_ - start);

        if ((word == "x" || word == "y")) {
            const std::size_t digits_start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == digits_start) fail_at("variable '" + std::string(word) + "' needs an index, e.g. " + std::string(word) + "1", start);
            long long idx = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + digits_start, text_.data() + pos_, idx);
            if (ec != std::errc() || idx < 1 || idx > n_)
                fail_at("variable index " + std::string(text_.substr(digits_start, pos_ - digits_start)) +
                            " out of range 1.." + std::to_string(n_),
                        start);
            return Expression::variable({word == "x" ? VarKind::base : VarKind::fiber, static_cast<int>(idx)});
        }

        UnaryOp op{};
        if (word == "sqrt") op = UnaryOp::sqrt;
        else if (word == "sin") op = UnaryOp::sin;
        else if (word == "cos") op = UnaryOp::cos;
        else if (word == "exp") op = UnaryOp::exp;
        else if (word == "log") op = UnaryOp::log;
        else if (word == "abs") op = UnaryOp::abs;
        else fail_at("unknown identifier '" + std::string(word) + "'", start);

        expect('(');
        Expression inner = parse_expr();
        expect(')');
        return Expression::make_unary(op, inner);
    }
};

} // namespace

Expression parse(std::string_view text, int n)
{
    if (n < 1) throw std::invalid_argument("parse: dimension must be >= 1");
    return Parser(text, n).parse_all();
}

} // namespace spraylab
