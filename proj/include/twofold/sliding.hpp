#pragma once

#include "twofold/field.hpp"

#include <string>
#include <vector>

namespace twofold {

inline constexpr double kResidualTol = 1e-12;
inline constexpr double kClassifyTol = 1e-12;
inline constexpr double kContractTol = 1e-9;

enum class Stability { Attracting, Repelling };

struct SlidingSolution {
    double lambda = 0.0;
    Vec2 slide_vector{};  // (dx2/dt, dx3/dt)
    Stability stability = Stability::Attracting;
    /// Fold contact: f1 has a double root here (reported once).
    bool double_root = false;
};

enum class RegionClass { Crossing, AttractingSliding, RepellingSliding, Tangency };

std::string to_string(RegionClass region);
std::string to_string(Stability stability);

/// Values of lambda in [-1, +1] with f1(0, x2, x3; lambda) = 0, ascending.
///
/// Normal-form systems use the closed-form quadratic; other systems use a
/// 200-sample bracketing scan refined by bisection.
[[nodiscard]] std::vector<SlidingSolution> sliding_lambda(const PiecewiseSmoothSystem& sys, double x2, double x3);

/// Same, from precomputed field values at (0, x2, x3).
[[nodiscard]] std::vector<SlidingSolution> sliding_lambda(const PiecewiseSmoothSystem& sys, const FieldSplit& values);

[[nodiscard]] RegionClass region_classify(const PiecewiseSmoothSystem& sys, double x2, double x3);
[[nodiscard]] RegionClass region_classify(double f1_plus, double f1_minus);

/// (f2, f3) at (0, x2, x3; lambda); requires |f1| <= 1e-9 there.
[[nodiscard]] Vec2 sliding_vector(const PiecewiseSmoothSystem& sys, double x2, double x3, double lambda);

struct CurvePoint {
    double lambda = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    Vec3 tangent{};  // d(lambda, x2, x3)/d lambda
};

/// Non-hyperbolic curve L of the normal form: x2 = alpha (lambda-1)^2, x3 = -alpha (lambda+1)^2.
struct CurveL {
    TwoFoldParams params;
    std::vector<CurvePoint> points;
};

[[nodiscard]] CurveL curve_L(const TwoFoldParams& p, int samples);

/// CSV with header `lambda,x2,x3,tx_lambda,tx_x2,tx_x3`.
[[nodiscard]] std::string curve_L_csv(const CurveL& curve);

struct DegeneracyReport {
    bool is_degenerate = false;
    /// d^2 f1 / d lambda^2 at each sample of L (constant -2 alpha).
    std::vector<double> second_derivative;
    double max_abs_second_derivative = 0.0;
};

[[nodiscard]] DegeneracyReport degeneracy_report(const TwoFoldParams& p, int samples = 101);

/// Region classes on a square grid of the surface, (x2, x3) in [lo, hi]^2.
struct SlideMap {
    double lo = -1.0;
    double hi = 1.0;
    int steps = 0;  // points per axis
    /// Row-major with x3 as the slow index.
    std::vector<RegionClass> regions;
    std::vector<std::vector<double>> lambdas;

    [[nodiscard]] double coordinate(int i) const { return lo + (hi - lo) * i / (steps - 1); }
};

[[nodiscard]] SlideMap slide_map(const PiecewiseSmoothSystem& sys, double lo, double hi, int steps);

/// CSV with header `x2,x3,region,lambdas` (sliding roots joined by ';').
[[nodiscard]] std::string slide_map_csv(const SlideMap& map);

}  // namespace twofold
