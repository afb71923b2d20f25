#include "twofold/singularity.hpp"

#include "twofold/errors.hpp"

#include <algorithm>
#include <cmath>

namespace twofold {

TwoFoldFlavor classify_two_fold(const TwoFoldParams& p) {
    p.validate();
    const double b1 = p.b1;
    const double b2 = p.b2;
    TwoFoldFlavor out;
    if (p.a1 == -1 && p.a2 == -1) {
        out.tag = Flavor::Visible;
        out.determinacy_breaking = b1 < 0.0 || b2 < 0.0 || b1 * b2 < 1.0;
    } else if (p.a1 == 1 && p.a2 == 1) {
        out.tag = Flavor::Invisible;
        out.determinacy_breaking = b1 < 0.0 && b2 < 0.0 && b1 * b2 > 1.0;
    } else {
        out.tag = Flavor::Mixed;
        out.determinacy_breaking = (b1 < 0.0 && 0.0 < b2 && b1 * b2 < -1.0) || (b1 + b2 < 0.0 && b1 - b2 < -2.0);
    }
    return out;
}

std::string to_string(Flavor flavor) {
    switch (flavor) {
    case Flavor::Visible:
        return "Visible";
    case Flavor::Invisible:
        return "Invisible";
    case Flavor::Mixed:
        return "Mixed";
    }
    return "?";
}

std::string to_string(FoldedType type) {
    switch (type) {
    case FoldedType::FoldedSaddle:
        return "FoldedSaddle";
    case FoldedType::FoldedNode:
        return "FoldedNode";
    case FoldedType::FoldedFocus:
        return "FoldedFocus";
    case FoldedType::Degenerate:
        return "Degenerate";
    }
    return "?";
}

std::string to_string(CanardFlag flag) {
    switch (flag) {
    case CanardFlag::Canard:
        return "Canard";
    case CanardFlag::FauxCanard:
        return "FauxCanard";
    case CanardFlag::Neutral:
        return "Neutral";
    }
    return "?";
}

std::vector<double> folded_lambda_roots(const TwoFoldParams& p) {
    p.validate();
    const double jump = p.b1 - p.b2;
    const double qa = static_cast<double>(p.a1 - p.a2) + jump;
    const double qb = 2.0 * static_cast<double>(p.a1 + p.a2);
    const double qc = static_cast<double>(p.a1 - p.a2) - jump;

    std::vector<double> roots;
    if (qa == 0.0) {
        if (qb != 0.0) {
            roots.push_back(-qc / qb);
        }
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc > 0.0) {
            const double s = std::sqrt(disc);
            // Stable pairing; for qb == 0 this reduces to +-sqrt(-qc/qa).
            const double r = -0.5 * (qb + (qb >= 0.0 ? s : -s));
            roots.push_back(r / qa);
            roots.push_back(qc / r);
        }
    }
    std::erase_if(roots, [](double l) { return !(l >= -1.0 && l <= 1.0); });
    std::sort(roots.begin(), roots.end());
    return roots;
}

FoldedConstants folded_constants(const TwoFoldParams& p, double lambda_s) {
    p.validate();
    if (std::abs(p.alpha) <= kAlphaZeroTol) {
        throw SingularityError(SingularityError::Kind::AlphaZero, "folded constants need alpha != 0");
    }
    if (std::abs(1.0 + lambda_s) <= kBoundaryTol) {
        throw SingularityError(SingularityError::Kind::BoundarySingularity, "lambda_s too close to -1");
    }
    const double a1 = p.a1;
    const double a2 = p.a2;
    const double l = lambda_s;
    const double abs_alpha = std::abs(p.alpha);
    const double root_alpha = std::sqrt(abs_alpha);

    FoldedConstants k;
    k.f2s = 0.5 * (a1 + p.b2) + 0.5 * (a1 - p.b2) * l;
    k.f3s = 0.5 * (p.b1 + a2) + 0.5 * (p.b1 - a2) * l;
    k.df2s = 0.5 * (a1 - p.b2);
    k.df3s = 0.5 * (p.b1 - a2);
    k.c = k.df2s - (1.0 - l) / (1.0 + l) * k.df3s;
    // Rectifying L uses y1L'(0) = -1/(2 alpha (1 + lambda_s)); that factor
    // carries into the z3 coefficient of the z2 equation.
    k.b = -0.5 * ((k.f2s + k.f3s) / (1.0 + l) + k.c) / (1.0 + l);
    k.d1 = -0.5 * (1.0 + l);
    k.a_tilde = k.f3s;
    k.c_tilde = -((l + 1.0) * k.df2s + (l - 1.0) * k.df3s) / (2.0 * root_alpha);
    k.b_tilde = -(k.f2s + k.f3s - 2.0 * k.c_tilde * root_alpha) / (4.0 * abs_alpha * (1.0 + l));
    return k;
}

FoldedClassification folded_type(double a_tilde, double b_tilde, double c_tilde) {
    FoldedClassification out;
    out.trace = c_tilde;
    out.det = 2.0 * a_tilde * b_tilde;
    const double ab = a_tilde * b_tilde;
    const double disc = c_tilde * c_tilde - 8.0 * ab;
    const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
    out.eigenvalues = {0.5 * (c_tilde - root), 0.5 * (c_tilde + root)};

    if (ab == 0.0 || disc == 0.0) {
        out.type = FoldedType::Degenerate;
    } else if (ab < 0.0) {
        out.type = FoldedType::FoldedSaddle;
    } else if (disc > 0.0) {
        out.type = FoldedType::FoldedNode;
    } else {
        out.type = FoldedType::FoldedFocus;
    }
    out.canard = c_tilde > 0.0 ? CanardFlag::Canard : (c_tilde < 0.0 ? CanardFlag::FauxCanard : CanardFlag::Neutral);
    return out;
}

std::vector<FoldedSingularity> folded_singularities(const TwoFoldParams& p) {
    p.validate();
    if (std::abs(p.alpha) <= kAlphaZeroTol) {
        throw SingularityError(SingularityError::Kind::AlphaZero, "folded singularities need alpha != 0");
    }
    std::vector<FoldedSingularity> out;
    for (const double l : folded_lambda_roots(p)) {
        if (std::abs(l + 1.0) <= kBoundaryTol || std::abs(l - 1.0) <= kBoundaryTol) {
            throw SingularityError(SingularityError::Kind::BoundarySingularity,
                                   "folded singularity at the edge of [-1, 1]: lambda_s = " + std::to_string(l));
        }
        FoldedSingularity s;
        s.lambda_s = l + 0.0;  // no -0
        s.x2s = p.alpha * (l - 1.0) * (l - 1.0);
        s.x3s = -p.alpha * (l + 1.0) * (l + 1.0);
        s.constants = folded_constants(p, l);
        s.classification = folded_type(s.constants.a_tilde, s.constants.b_tilde, s.constants.c_tilde);
        s.time_reversed = p.alpha > 0.0;
        s.canard_original_time = s.classification.canard;
        if (s.time_reversed && s.canard_original_time != CanardFlag::Neutral) {
            s.canard_original_time =
                s.canard_original_time == CanardFlag::Canard ? CanardFlag::FauxCanard : CanardFlag::Canard;
        }
        out.push_back(s);
    }
    return out;
}

SlowProjection slow_projection_field(double a_tilde, double b_tilde, double c_tilde, double x1, double x3) {
    if (x1 == 0.0) {
        throw SingularityError(SingularityError::Kind::PrefactorSingular, "slow projection is singular at x1 = 0");
    }
    SlowProjection out;
    out.linear = {c_tilde * x1 + b_tilde * x3, -2.0 * a_tilde * x1};
    out.prefactor = 1.0 / (-2.0 * x1);
    return out;
}

}  // namespace twofold
