#pragma once

#include "twofold/vec.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace twofold {

/// Exact rational coefficient; always normalized with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    /// Smallest-denominator rational whose nearest double is `value`
    /// (falls back to the exact dyadic value).
    static Rational from_double(double value);

    [[nodiscard]] std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] double value() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Rational&, const Rational&) = default;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Immutable scalar expression in x1, x2, x3.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := base ('^' uint)?
///   base   := number | 'x1' | 'x2' | 'x3' | '(' expr ')' | '-' base
///   number := int ('/' uint)? | decimal
class Expression {
public:
    struct Node;

    Expression();  // the constant 0

    static Expression parse(std::string_view text);
    static Expression constant(Rational value);
    static Expression constant(double value) { return constant(Rational::from_double(value)); }
    static Expression variable(int index);  // 1, 2 or 3

    [[nodiscard]] double evaluate(const Vec3& x) const;
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] bool is_zero_constant() const;

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    [[nodiscard]] Expression pow(unsigned exponent) const;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    std::shared_ptr<const Node> root_;
};

}  // namespace twofold
