#pragma once

#include "twofold/singularity.hpp"

#include <array>
#include <vector>

namespace twofold {

using Mat3 = std::array<Vec3, 3>;  // row-major

/// Coordinate chain around one folded singularity. Points are (lambda, x2, x3).
class TransformContext {
public:
    /// Throws SingularityError when alpha ~ 0 or lambda_s ~ -1, ContractViolation for epsilon outside (0, 1].
    TransformContext(const TwoFoldParams& params, const FoldedSingularity& singularity, double epsilon);

    [[nodiscard]] const TwoFoldParams& params() const noexcept { return params_; }
    [[nodiscard]] const FoldedSingularity& singularity() const noexcept { return singularity_; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] TransformContext with_epsilon(double epsilon) const;

    /// eps f3s / (alpha (1 + lambda_s)^2), the corrective shift of z2.
    [[nodiscard]] double z2_shift() const;

private:
    TwoFoldParams params_;
    FoldedSingularity singularity_;
    double epsilon_;
};

/// Translation putting the singularity at the origin.
[[nodiscard]] Vec3 to_y(const TransformContext& ctx, const Vec3& point);
[[nodiscard]] Vec3 from_y(const TransformContext& ctx, const Vec3& y);

struct CurveFunctions {
    double y1L = 0.0;
    double y2L = 0.0;
    double dy1L = 0.0;
    double dy2L = 0.0;
};

/// L parameterized by y3. Throws DomainError when (1+lambda_s)^2 - y3/alpha < 0.
[[nodiscard]] CurveFunctions curve_functions(const TransformContext& ctx, double y3);

/// Rectification z = (y1 - y1L(y3), y2 - y2L(y3), y3).
[[nodiscard]] Vec3 rectify(const TransformContext& ctx, const Vec3& y);
[[nodiscard]] Vec3 unrectify(const TransformContext& ctx, const Vec3& z);

/// Shift and scaling: z -> (sqrt|alpha| z1, -sign(alpha) d1 (z2 - shift), -sign(alpha) z3).
[[nodiscard]] Vec3 scale(const TransformContext& ctx, const Vec3& z);
[[nodiscard]] Vec3 unscale(const TransformContext& ctx, const Vec3& x_tilde);

[[nodiscard]] Vec3 to_x_tilde(const TransformContext& ctx, const Vec3& point);
[[nodiscard]] Vec3 from_x_tilde(const TransformContext& ctx, const Vec3& x_tilde);

[[nodiscard]] Mat3 rectify_jacobian(const TransformContext& ctx, const Vec3& y);
[[nodiscard]] Mat3 scale_jacobian(const TransformContext& ctx);
/// d x_tilde / d (lambda, x2, x3); the translation has identity Jacobian.
[[nodiscard]] Mat3 to_x_tilde_jacobian(const TransformContext& ctx, const Vec3& point);

/// (lambda', dx2/dt, dx3/dt) of the blown-up normal form, lambda' = eps dlambda/dt.
[[nodiscard]] Vec3 blowup_field(const TwoFoldParams& p, const Vec3& point);

enum class TimeNormalization {
    Fast,  // first row is eps dx1/dt
    Slow,  // first row is dx1/dt
};

/// Truncated folded normal form (x2 + x1^2, b x3 + c x1, a).
[[nodiscard]] Vec3 folded_normal_field(double a_tilde, double b_tilde, double c_tilde, double epsilon,
                                       const Vec3& x_tilde, TimeNormalization norm = TimeNormalization::Fast);

/// Blow-up field pushed into x_tilde (scaled time, fast row times eps/sqrt|alpha|)
/// minus the truncated normal form, at one point given in x_tilde coordinates.
[[nodiscard]] Vec3 equivalence_defect(const TransformContext& ctx, const Vec3& x_tilde);

struct EquivalenceResidual {
    double h = 0.0;
    Vec3 rows{};            // max |defect| per row over the sphere
    double combined = 0.0;  // max(r1, r2, h r3)
};

/// Defects over a sphere of radius h in x_tilde coordinates with eps = h.
/// The x3 row has an O(1) leading term, so its remainder enters scaled by h.
[[nodiscard]] EquivalenceResidual equivalence_residual(const TransformContext& ctx, double h, int samples = 64);

struct TransformCheck {
    TwoFoldParams params;
    FoldedSingularity singularity;
    std::vector<double> h_values;
    std::vector<EquivalenceResidual> residuals;
    double slope = 0.0;
    bool pass = false;
};

inline constexpr double kSlopeTarget = 2.0;
inline constexpr double kSlopeTolerance = 0.1;

/// Log-log slope of equivalence_residual over h in {1e-1, 1e-2, 1e-3, 1e-4}.
[[nodiscard]] TransformCheck transform_check(const TwoFoldParams& p, const FoldedSingularity& singularity,
                                             std::vector<double> h_values = {1e-1, 1e-2, 1e-3, 1e-4});

/// Least-squares slope of log10(y) against log10(x).
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twofold
