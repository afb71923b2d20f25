#include "twofold/field.hpp"

#include "twofold/errors.hpp"

#include <cmath>

namespace twofold {

std::array<std::string, 3> SmoothField::to_strings() const {
    return {components_[0].to_string(), components_[1].to_string(), components_[2].to_string()};
}

bool SmoothField::is_zero() const {
    return components_[0].is_zero_constant() && components_[1].is_zero_constant() &&
           components_[2].is_zero_constant();
}

SmoothField parse_field(std::string_view e1, std::string_view e2, std::string_view e3) {
    return SmoothField({Expression::parse(e1), Expression::parse(e2), Expression::parse(e3)});
}

void TwoFoldParams::validate() const {
    if ((a1 != 1 && a1 != -1) || (a2 != 1 && a2 != -1)) {
        throw ContractViolation("a1 and a2 must be +1 or -1");
    }
    if (!std::isfinite(b1) || !std::isfinite(b2) || !std::isfinite(alpha)) {
        throw ContractViolation("b1, b2 and alpha must be finite");
    }
}

Vec3 FieldSplit::combine(double lambda) const {
    const double wp = 0.5 * (1.0 + lambda);
    const double wm = 0.5 * (1.0 - lambda);
    const double wg = 1.0 - lambda * lambda;
    return {wp * plus[0] + wm * minus[0] + wg * hidden[0],
            wp * plus[1] + wm * minus[1] + wg * hidden[1],
            wp * plus[2] + wm * minus[2] + wg * hidden[2]};
}

FieldSplit split(const PiecewiseSmoothSystem& sys, const Vec3& x) {
    return {sys.f_plus(x), sys.f_minus(x), sys.hidden(x)};
}

Vec3 eval_combination(const PiecewiseSmoothSystem& sys, const Vec3& x, double lambda) {
    if (!(lambda >= -1.0 && lambda <= 1.0)) {
        throw ContractViolation("lambda outside [-1, +1]: " + std::to_string(lambda));
    }
    return split(sys, x).combine(lambda);
}

Vec3 eval_piecewise(const PiecewiseSmoothSystem& sys, const Vec3& x) {
    if (x[0] == 0.0) {
        throw ContractViolation("eval_piecewise is ambiguous on x1 = 0");
    }
    return x[0] > 0.0 ? sys.f_plus(x) : sys.f_minus(x);
}

PiecewiseSmoothSystem normal_form_system(const TwoFoldParams& p) {
    p.validate();
    const auto c = [](double v) { return Expression::constant(v); };
    const auto x2 = Expression::variable(2);
    const auto x3 = Expression::variable(3);

    PiecewiseSmoothSystem sys;
    sys.f_plus = SmoothField({-x2, c(p.a1), c(p.b1)});
    sys.f_minus = SmoothField({x3, c(p.b2), c(p.a2)});
    sys.hidden = SmoothField({c(p.alpha), c(0.0), c(0.0)});
    sys.normal_form = p;
    return sys;
}

}  // namespace twofold
