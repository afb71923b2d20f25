#pragma once

#include "twofold/field.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace twofold {

inline constexpr double kAlphaZeroTol = 1e-9;
inline constexpr double kBoundaryTol = 1e-9;

enum class Flavor { Visible, Invisible, Mixed };

struct TwoFoldFlavor {
    Flavor tag = Flavor::Visible;
    bool determinacy_breaking = false;
};

/// Flavor from (a1, a2) and the determinacy-breaking conditions on (b1, b2).
/// Strict inequalities are evaluated exactly.
[[nodiscard]] TwoFoldFlavor classify_two_fold(const TwoFoldParams& p);

enum class FoldedType { FoldedSaddle, FoldedNode, FoldedFocus, Degenerate };
enum class CanardFlag { Canard, FauxCanard, Neutral };

std::string to_string(Flavor flavor);
std::string to_string(FoldedType type);
std::string to_string(CanardFlag flag);

struct FoldedConstants {
    double f2s = 0.0;
    double f3s = 0.0;
    double df2s = 0.0;  // d f2 / d lambda
    double df3s = 0.0;  // d f3 / d lambda
    double c = 0.0;
    double b = 0.0;
    double d1 = 0.0;
    double a_tilde = 0.0;
    double b_tilde = 0.0;
    double c_tilde = 0.0;
};

struct FoldedClassification {
    FoldedType type = FoldedType::Degenerate;
    CanardFlag canard = CanardFlag::Neutral;
    std::array<std::complex<double>, 2> eigenvalues{};
    double trace = 0.0;
    double det = 0.0;
};

struct FoldedSingularity {
    double lambda_s = 0.0;
    double x2s = 0.0;
    double x3s = 0.0;
    FoldedConstants constants;
    FoldedClassification classification;
    /// The scaled time runs as -sign(alpha) t, so alpha > 0 reverses time.
    bool time_reversed = false;
    /// Canard flag after undoing the time reversal.
    CanardFlag canard_original_time = CanardFlag::Neutral;
};

/// Roots in [-1, +1] of (a1-a2+b1-b2) l^2 + 2(a1+a2) l + (a1-a2) - (b1-b2) = 0,
/// ascending. Coincident roots (|b1-b2| = 2 in the mixed case) are not reported.
[[nodiscard]] std::vector<double> folded_lambda_roots(const TwoFoldParams& p);

/// Folded singularities on L with constants and type.
/// Throws SingularityError (AlphaZero, BoundarySingularity).
[[nodiscard]] std::vector<FoldedSingularity> folded_singularities(const TwoFoldParams& p);

[[nodiscard]] FoldedConstants folded_constants(const TwoFoldParams& p, double lambda_s);

[[nodiscard]] FoldedClassification folded_type(double a_tilde, double b_tilde, double c_tilde);

struct SlowProjection {
    Vec2 linear{};            // [[c, b], [-2a, 0]] (x1, x3)
    double prefactor = 0.0;   // 1 / (-2 x1)
};

/// Projection of the folded normal form onto its critical manifold.
/// Throws SingularityError(PrefactorSingular) when x1 == 0.
[[nodiscard]] SlowProjection slow_projection_field(double a_tilde, double b_tilde, double c_tilde, double x1,
                                                   double x3);

}  // namespace twofold
