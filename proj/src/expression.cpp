#include "twofold/expression.hpp"

#include "twofold/errors.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace twofold {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw ContractViolation("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g > 1 ? num / g : num;
    den_ = g > 1 ? den / g : den;
}

Rational Rational::from_double(double value) {
    if (!std::isfinite(value)) {
        throw ContractViolation("non-finite coefficient");
    }
    constexpr double kExact = 9007199254740992.0;  // 2^53
    if (value == std::floor(value) && std::abs(value) < kExact) {
        return Rational(static_cast<std::int64_t>(value));
    }

    // Continued-fraction convergents: first one that rounds back to `value`.
    const double target = std::abs(value);
    double r = target;
    double h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(r);
        const double h = a * h1 + h2;
        const double k = a * k1 + k2;
        if (h >= kExact || k >= kExact) {
            break;
        }
        if (h / k == target) {
            const auto num = static_cast<std::int64_t>(h);
            return Rational(value < 0 ? -num : num, static_cast<std::int64_t>(k));
        }
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        const double frac = r - a;
        if (frac == 0.0) {
            break;
        }
        r = 1.0 / frac;
    }

    int exponent = 0;
    const double mantissa = std::frexp(value, &exponent);
    const auto m = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    const int shift = 53 - exponent;  // value = m / 2^shift
    if (shift <= 0 || shift > 62) {
        throw ContractViolation("coefficient cannot be stored as a rational: " + std::to_string(value));
    }
    return Rational(m, std::int64_t{1} << shift);
}

std::string Rational::to_string() const {
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

// ---------------------------------------------------------------------------

struct Expression::Node {
    enum class Kind { Constant, Variable, Negate, Add, Subtract, Multiply, Power };

    Kind kind = Kind::Constant;
    Rational constant;
    double constant_value = 0.0;
    int variable = 0;
    unsigned exponent = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make_constant(Rational value) {
    auto node = std::make_shared<Expression::Node>();
    node->kind = Kind::Constant;
    node->constant = value;
    node->constant_value = value.value();
    return node;
}

NodePtr make_variable(int index) {
    auto node = std::make_shared<Expression::Node>();
    node->kind = Kind::Variable;
    node->variable = index;
    return node;
}

NodePtr make_unary(Kind kind, NodePtr operand, unsigned exponent = 0) {
    auto node = std::make_shared<Expression::Node>();
    node->kind = kind;
    node->lhs = std::move(operand);
    node->exponent = exponent;
    return node;
}

NodePtr make_binary(Kind kind, NodePtr lhs, NodePtr rhs) {
    auto node = std::make_shared<Expression::Node>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
}

double evaluate_node(const Expression::Node& node, const Vec3& x) {
    switch (node.kind) {
    case Kind::Constant:
        return node.constant_value;
    case Kind::Variable:
        return x[static_cast<std::size_t>(node.variable - 1)];
    case Kind::Negate:
        return -evaluate_node(*node.lhs, x);
    case Kind::Add:
        return evaluate_node(*node.lhs, x) + evaluate_node(*node.rhs, x);
    case Kind::Subtract:
        return evaluate_node(*node.lhs, x) - evaluate_node(*node.rhs, x);
    case Kind::Multiply:
        return evaluate_node(*node.lhs, x) * evaluate_node(*node.rhs, x);
    case Kind::Power: {
        const double base = evaluate_node(*node.lhs, x);
        if (node.exponent > 64) {
            return std::pow(base, static_cast<double>(node.exponent));
        }
        double result = 1.0;
        for (unsigned i = 0; i < node.exponent; ++i) {
            result *= base;
        }
        return result;
    }
    }
    return 0.0;
}

// Printing precedence: sums 1, products 2, powers 3, bases 4.
int precedence(const Expression::Node& node) {
    switch (node.kind) {
    case Kind::Add:
    case Kind::Subtract:
        return 1;
    case Kind::Multiply:
        return 2;
    case Kind::Power:
        return 3;
    default:
        return 4;
    }
}

void print_node(const Expression::Node& node, std::ostream& out);

void print_wrapped(const Expression::Node& node, bool wrap, std::ostream& out) {
    if (wrap) {
        out << '(';
    }
    print_node(node, out);
    if (wrap) {
        out << ')';
    }
}

void print_node(const Expression::Node& node, std::ostream& out) {
    switch (node.kind) {
    case Kind::Constant:
        out << node.constant.to_string();
        return;
    case Kind::Variable:
        out << 'x' << node.variable;
        return;
    case Kind::Negate:
        out << '-';
        print_wrapped(*node.lhs, precedence(*node.lhs) < 4, out);
        return;
    case Kind::Add:
    case Kind::Subtract:
        print_wrapped(*node.lhs, false, out);
        out << (node.kind == Kind::Add ? " + " : " - ");
        print_wrapped(*node.rhs, precedence(*node.rhs) <= 1, out);
        return;
    case Kind::Multiply:
        print_wrapped(*node.lhs, precedence(*node.lhs) < 2, out);
        out << '*';
        print_wrapped(*node.rhs, precedence(*node.rhs) <= 2, out);
        return;
    case Kind::Power:
        print_wrapped(*node.lhs, precedence(*node.lhs) < 4, out);
        out << '^' << node.exponent;
        return;
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        auto node = parse_expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ExpressionError(ExpressionError::Kind::Syntax, pos_, message);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(Kind::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = make_binary(Kind::Subtract, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        while (accept('*')) {
            lhs = make_binary(Kind::Multiply, lhs, parse_factor());
        }
        return lhs;
    }

    NodePtr parse_factor() {
        auto base = parse_base();
        if (accept('^')) {
            skip_space();
            const std::size_t start = pos_;
            const std::uint64_t exponent = parse_digits();
            if (exponent > std::numeric_limits<unsigned>::max()) {
                throw ExpressionError(ExpressionError::Kind::NumberRange, start, "exponent too large");
            }
            return make_unary(Kind::Power, base, static_cast<unsigned>(exponent));
        }
        return base;
    }

    NodePtr parse_base() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of expression");
        }
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return make_unary(Kind::Negate, parse_base());
        }
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x1" || name == "x2" || name == "x3") {
                return make_variable(name[1] - '0');
            }
            throw ExpressionError(ExpressionError::Kind::UnknownIdentifier, start,
                                  "unknown identifier '" + std::string(name) + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::uint64_t parse_digits() {
        const std::size_t start = pos_;
        std::uint64_t value = 0;
        constexpr std::uint64_t kLimit = std::numeric_limits<std::int64_t>::max();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
            if (value > (kLimit - digit) / 10) {
                throw ExpressionError(ExpressionError::Kind::NumberRange, start, "numeric literal out of range");
            }
            value = value * 10 + digit;
            ++pos_;
        }
        if (pos_ == start) {
            fail("expected digits");
        }
        return value;
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        std::uint64_t whole = 0;
        if (text_[pos_] != '.') {
            whole = parse_digits();
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            std::uint64_t numerator = whole;
            std::int64_t denominator = 1;
            bool any = start != pos_ - 1;
            constexpr std::uint64_t kLimit = std::numeric_limits<std::int64_t>::max();
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
                if (numerator > (kLimit - digit) / 10 || denominator > static_cast<std::int64_t>(kLimit / 10)) {
                    throw ExpressionError(ExpressionError::Kind::NumberRange, start, "decimal literal has too many digits");
                }
                numerator = numerator * 10 + digit;
                denominator *= 10;
                any = true;
                ++pos_;
            }
            if (!any) {
                fail("malformed decimal");
            }
            return make_constant(Rational(static_cast<std::int64_t>(numerator), denominator));
        }
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            skip_space();
            const std::size_t den_pos = pos_;
            const std::uint64_t den = parse_digits();
            if (den == 0) {
                throw ExpressionError(ExpressionError::Kind::NumberRange, den_pos, "zero denominator");
            }
            return make_constant(Rational(static_cast<std::int64_t>(whole), static_cast<std::int64_t>(den)));
        }
        return make_constant(Rational(static_cast<std::int64_t>(whole)));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(make_constant(Rational(0))) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(Rational value) { return Expression(make_constant(value)); }

Expression Expression::variable(int index) {
    if (index < 1 || index > 3) {
        throw ContractViolation("variable index must be 1, 2 or 3");
    }
    return Expression(make_variable(index));
}

double Expression::evaluate(const Vec3& x) const { return evaluate_node(*root_, x); }

std::string Expression::to_string() const {
    std::ostringstream out;
    print_node(*root_, out);
    return out.str();
}

bool Expression::is_zero_constant() const {
    return root_->kind == Kind::Constant && root_->constant.num() == 0;
}

Expression operator+(const Expression& a, const Expression& b) {
    return Expression(make_binary(Kind::Add, a.root_, b.root_));
}

Expression operator-(const Expression& a, const Expression& b) {
    return Expression(make_binary(Kind::Subtract, a.root_, b.root_));
}

Expression operator*(const Expression& a, const Expression& b) {
    return Expression(make_binary(Kind::Multiply, a.root_, b.root_));
}

Expression operator-(const Expression& a) { return Expression(make_unary(Kind::Negate, a.root_)); }

Expression Expression::pow(unsigned exponent) const {
    return Expression(make_unary(Kind::Power, root_, exponent));
}

}  // namespace twofold
