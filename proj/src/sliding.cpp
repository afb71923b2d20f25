#include "twofold/sliding.hpp"

#include "twofold/detail/format.hpp"
#include "twofold/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twofold {

namespace {

constexpr int kScanSamples = 200;
constexpr double kDoubleRootTol = 1e-12;

struct Quadratic {
    double a = 0.0;  // f1 = a lambda^2 + b lambda + c
    double b = 0.0;
    double c = 0.0;
};

Quadratic f1_coefficients(const FieldSplit& v) {
    return {-v.hidden[0], 0.5 * (v.plus[0] - v.minus[0]), 0.5 * (v.plus[0] + v.minus[0]) + v.hidden[0]};
}

struct Root {
    double lambda;
    bool double_root;
};

std::vector<Root> quadratic_roots(const Quadratic& q) {
    std::vector<Root> roots;
    if (q.a == 0.0) {
        if (q.b != 0.0) {
            roots.push_back({-q.c / q.b, false});
        }
        return roots;
    }
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (std::abs(disc) <= kDoubleRootTol) {
        roots.push_back({-q.b / (2.0 * q.a), true});
        return roots;
    }
    if (disc < 0.0) {
        return roots;
    }
    const double s = std::sqrt(disc);
    const double r = -0.5 * (q.b + std::copysign(s, q.b));
    roots.push_back({r / q.a, false});
    roots.push_back({q.c / r, false});
    return roots;
}

std::vector<Root> scanned_roots(const FieldSplit& v) {
    std::vector<Root> roots;
    auto lambda_at = [](int i) { return -1.0 + 2.0 * static_cast<double>(i) / kScanSamples; };
    double prev = v.f1(lambda_at(0));
    if (prev == 0.0) {
        roots.push_back({-1.0, false});
    }
    for (int i = 1; i <= kScanSamples; ++i) {
        const double hi_lambda = lambda_at(i);
        const double cur = v.f1(hi_lambda);
        if (cur == 0.0) {
            roots.push_back({hi_lambda, false});
        } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
            double lo = lambda_at(i - 1);
            double hi = hi_lambda;
            double f_lo = prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                const double f_mid = v.f1(mid);
                if (f_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((f_mid < 0.0) == (f_lo < 0.0)) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back({std::abs(v.f1(lo)) <= std::abs(v.f1(hi)) ? lo : hi, false});
        }
        prev = cur;
    }
    return roots;
}

}  // namespace

std::string to_string(RegionClass region) {
    switch (region) {
    case RegionClass::Crossing:
        return "Crossing";
    case RegionClass::AttractingSliding:
        return "AttractingSliding";
    case RegionClass::RepellingSliding:
        return "RepellingSliding";
    case RegionClass::Tangency:
        return "Tangency";
    }
    return "?";
}

std::string to_string(Stability stability) {
    return stability == Stability::Attracting ? "Attracting" : "Repelling";
}

std::vector<SlidingSolution> sliding_lambda(const PiecewiseSmoothSystem& sys, const FieldSplit& values) {
    const std::vector<Root> roots =
        sys.normal_form ? quadratic_roots(f1_coefficients(values)) : scanned_roots(values);

    std::vector<SlidingSolution> out;
    for (const Root& root : roots) {
        if (!(root.lambda >= -1.0 - kResidualTol && root.lambda <= 1.0 + kResidualTol)) {
            continue;
        }
        const double lambda = std::clamp(root.lambda, -1.0, 1.0);
        const Vec3 f = values.combine(lambda);
        SlidingSolution s;
        s.lambda = lambda;
        s.slide_vector = {f[1], f[2]};
        s.stability = values.df1_dlambda(lambda) < 0.0 ? Stability::Attracting : Stability::Repelling;
        s.double_root = root.double_root;
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.lambda < r.lambda; });
    return out;
}

std::vector<SlidingSolution> sliding_lambda(const PiecewiseSmoothSystem& sys, double x2, double x3) {
    return sliding_lambda(sys, split(sys, {0.0, x2, x3}));
}

RegionClass region_classify(double f1_plus, double f1_minus) {
    if (std::abs(f1_plus) <= kClassifyTol || std::abs(f1_minus) <= kClassifyTol) {
        return RegionClass::Tangency;
    }
    if (f1_plus < 0.0 && f1_minus > 0.0) {
        return RegionClass::AttractingSliding;
    }
    if (f1_plus > 0.0 && f1_minus < 0.0) {
        return RegionClass::RepellingSliding;
    }
    return RegionClass::Crossing;
}

RegionClass region_classify(const PiecewiseSmoothSystem& sys, double x2, double x3) {
    const Vec3 x{0.0, x2, x3};
    return region_classify(sys.f_plus.component(0, x), sys.f_minus.component(0, x));
}

Vec2 sliding_vector(const PiecewiseSmoothSystem& sys, double x2, double x3, double lambda) {
    const Vec3 f = eval_combination(sys, {0.0, x2, x3}, lambda);
    if (std::abs(f[0]) > kContractTol) {
        throw ContractViolation("lambda is not a sliding solution: |f1| = " + std::to_string(std::abs(f[0])));
    }
    return {f[1], f[2]};
}

CurveL curve_L(const TwoFoldParams& p, int samples) {
    p.validate();
    if (samples < 2) {
        throw ContractViolation("curve_L needs at least two samples");
    }
    CurveL curve;
    curve.params = p;
    curve.points.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double lambda = i == samples - 1 ? 1.0 : -1.0 + 2.0 * i / (samples - 1);
        CurvePoint pt;
        pt.lambda = lambda;
        pt.x2 = p.alpha * (lambda - 1.0) * (lambda - 1.0);
        pt.x3 = -p.alpha * (lambda + 1.0) * (lambda + 1.0);
        pt.tangent = {1.0, 2.0 * p.alpha * (lambda - 1.0), -2.0 * p.alpha * (lambda + 1.0)};
        curve.points.push_back(pt);
    }
    return curve;
}

std::string curve_L_csv(const CurveL& curve) {
    using detail::format_double;
    std::ostringstream out;
    out << "lambda,x2,x3,tx_lambda,tx_x2,tx_x3\n";
    for (const auto& pt : curve.points) {
        out << format_double(pt.lambda) << ',' << format_double(pt.x2) << ',' << format_double(pt.x3) << ','
            << format_double(pt.tangent[0]) << ',' << format_double(pt.tangent[1]) << ','
            << format_double(pt.tangent[2]) << '\n';
    }
    return out.str();
}

DegeneracyReport degeneracy_report(const TwoFoldParams& p, int samples) {
    const PiecewiseSmoothSystem sys = normal_form_system(p);
    const CurveL curve = curve_L(p, samples);

    DegeneracyReport report;
    report.is_degenerate = p.alpha == 0.0;
    for (const auto& pt : curve.points) {
        // f1 is quadratic in lambda with leading coefficient -g1.
        const double d2 = -2.0 * sys.hidden.component(0, {0.0, pt.x2, pt.x3});
        report.second_derivative.push_back(d2);
        report.max_abs_second_derivative = std::max(report.max_abs_second_derivative, std::abs(d2));
    }
    return report;
}

SlideMap slide_map(const PiecewiseSmoothSystem& sys, double lo, double hi, int steps) {
    if (steps < 2 || !(lo < hi)) {
        throw ContractViolation("slide map needs lo < hi and at least two steps");
    }
    SlideMap map;
    map.lo = lo;
    map.hi = hi;
    map.steps = steps;
    for (int j = 0; j < steps; ++j) {
        for (int i = 0; i < steps; ++i) {
            const double x2 = map.coordinate(i);
            const double x3 = map.coordinate(j);
            map.regions.push_back(region_classify(sys, x2, x3));
            std::vector<double> lambdas;
            for (const auto& root : sliding_lambda(sys, x2, x3)) {
                lambdas.push_back(root.lambda);
            }
            map.lambdas.push_back(std::move(lambdas));
        }
    }
    return map;
}

std::string slide_map_csv(const SlideMap& map) {
    std::ostringstream out;
    out << "x2,x3,region,lambdas\n";
    for (int j = 0; j < map.steps; ++j) {
        for (int i = 0; i < map.steps; ++i) {
            const auto idx = static_cast<std::size_t>(j * map.steps + i);
            out << detail::format_double(map.coordinate(i)) << ',' << detail::format_double(map.coordinate(j))
                << ',' << to_string(map.regions[idx]) << ',';
            for (std::size_t k = 0; k < map.lambdas[idx].size(); ++k) {
                out << (k ? ";" : "") << detail::format_double(map.lambdas[idx][k]);
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace twofold
