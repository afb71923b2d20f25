#pragma once

#include "twofold/expression.hpp"
#include "twofold/vec.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace twofold {

/// Vector field R^3 -> R^3 given by three expressions.
class SmoothField {
public:
    SmoothField() = default;
    explicit SmoothField(std::array<Expression, 3> components) : components_(std::move(components)) {}

    [[nodiscard]] Vec3 operator()(const Vec3& x) const {
        return {components_[0].evaluate(x), components_[1].evaluate(x), components_[2].evaluate(x)};
    }
    [[nodiscard]] double component(int i, const Vec3& x) const {
        return components_[static_cast<std::size_t>(i)].evaluate(x);
    }
    [[nodiscard]] const Expression& expression(int i) const { return components_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::array<std::string, 3> to_strings() const;
    [[nodiscard]] bool is_zero() const;

private:
    std::array<Expression, 3> components_;
};

SmoothField parse_field(std::string_view e1, std::string_view e2, std::string_view e3);

/// Normal-form constants: a1, a2 in {-1,+1}; b1, b2 real; alpha the hidden coefficient.
struct TwoFoldParams {
    int a1 = 1;
    int a2 = 1;
    double b1 = 0.0;
    double b2 = 0.0;
    double alpha = 0.0;

    /// Throws ContractViolation unless a1, a2 are +-1 and b1, b2, alpha finite.
    void validate() const;

    friend bool operator==(const TwoFoldParams&, const TwoFoldParams&) = default;
};

/// f(x; lambda) = (1+lambda)/2 f+ + (1-lambda)/2 f- + (1-lambda^2) g, switching on x1 = 0.
struct PiecewiseSmoothSystem {
    SmoothField f_plus;
    SmoothField f_minus;
    SmoothField hidden;
    /// Set when the system was built from normal-form constants.
    std::optional<TwoFoldParams> normal_form;
};

/// Values of f+, f-, g at one point; f(x; lambda) is quadratic in lambda.
struct FieldSplit {
    Vec3 plus{};
    Vec3 minus{};
    Vec3 hidden{};

    [[nodiscard]] double f1(double lambda) const {
        return 0.5 * (1.0 + lambda) * plus[0] + 0.5 * (1.0 - lambda) * minus[0] + (1.0 - lambda * lambda) * hidden[0];
    }
    [[nodiscard]] double df1_dlambda(double lambda) const {
        return 0.5 * (plus[0] - minus[0]) - 2.0 * lambda * hidden[0];
    }
    [[nodiscard]] Vec3 combine(double lambda) const;
};

[[nodiscard]] FieldSplit split(const PiecewiseSmoothSystem& sys, const Vec3& x);

/// Combined field; lambda must lie in [-1, +1] (ContractViolation otherwise).
[[nodiscard]] Vec3 eval_combination(const PiecewiseSmoothSystem& sys, const Vec3& x, double lambda);

/// f+ or f- by the sign of x1; x1 == 0 is rejected.
[[nodiscard]] Vec3 eval_piecewise(const PiecewiseSmoothSystem& sys, const Vec3& x);

/// f+ = (-x2, a1, b1), f- = (x3, b2, a2), g = (alpha, 0, 0).
[[nodiscard]] PiecewiseSmoothSystem normal_form_system(const TwoFoldParams& p);

}  // namespace twofold
