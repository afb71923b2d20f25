#include "twofold/transform.hpp"

#include "twofold/errors.hpp"

#include <cmath>
#include <numbers>

namespace twofold {

namespace {

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    return out;
}

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

}  // namespace

TransformContext::TransformContext(const TwoFoldParams& params, const FoldedSingularity& singularity, double epsilon)
    : params_(params), singularity_(singularity), epsilon_(epsilon) {
    params_.validate();
    if (std::abs(params_.alpha) <= kAlphaZeroTol) {
        throw SingularityError(SingularityError::Kind::AlphaZero, "transform needs alpha != 0");
    }
    if (std::abs(1.0 + singularity_.lambda_s) <= kBoundaryTol) {
        throw SingularityError(SingularityError::Kind::BoundarySingularity, "lambda_s too close to -1");
    }
    if (!(epsilon_ > 0.0 && epsilon_ <= 1.0)) {
        throw ContractViolation("epsilon must lie in (0, 1]");
    }
}

TransformContext TransformContext::with_epsilon(double epsilon) const {
    return TransformContext(params_, singularity_, epsilon);
}

double TransformContext::z2_shift() const {
    const double one_plus = 1.0 + singularity_.lambda_s;
    return epsilon_ * singularity_.constants.f3s / (params_.alpha * one_plus * one_plus);
}

Vec3 to_y(const TransformContext& ctx, const Vec3& point) {
    const auto& s = ctx.singularity();
    return {point[0] - s.lambda_s, point[1] - s.x2s, point[2] - s.x3s};
}

Vec3 from_y(const TransformContext& ctx, const Vec3& y) {
    const auto& s = ctx.singularity();
    return {y[0] + s.lambda_s, y[1] + s.x2s, y[2] + s.x3s};
}

CurveFunctions curve_functions(const TransformContext& ctx, double y3) {
    const double alpha = ctx.params().alpha;
    const double one_plus = 1.0 + ctx.singularity().lambda_s;
    const double arg = one_plus * one_plus - y3 / alpha;
    if (arg < 0.0) {
        throw DomainError("outside the rectification domain: (1+lambda_s)^2 - y3/alpha = " + std::to_string(arg));
    }
    // Only the +sqrt branch passes through the singularity.
    const double root = std::sqrt(arg);
    CurveFunctions out;
    out.y1L = -one_plus + root;
    out.y2L = -y3 - 4.0 * alpha * out.y1L;
    out.dy1L = (-0.5 / alpha) / root;
    out.dy2L = (1.0 - ctx.singularity().lambda_s - out.y1L) / root;
    return out;
}

Vec3 rectify(const TransformContext& ctx, const Vec3& y) {
    const CurveFunctions L = curve_functions(ctx, y[2]);
    return {y[0] - L.y1L, y[1] - L.y2L, y[2]};
}

Vec3 unrectify(const TransformContext& ctx, const Vec3& z) {
    const CurveFunctions L = curve_functions(ctx, z[2]);
    return {z[0] + L.y1L, z[1] + L.y2L, z[2]};
}

Vec3 scale(const TransformContext& ctx, const Vec3& z) {
    const double alpha = ctx.params().alpha;
    const double sigma = sign_of(alpha);
    const double d1 = ctx.singularity().constants.d1;
    return {std::sqrt(std::abs(alpha)) * z[0], -sigma * d1 * (z[1] - ctx.z2_shift()), -sigma * z[2]};
}

Vec3 unscale(const TransformContext& ctx, const Vec3& x_tilde) {
    const double alpha = ctx.params().alpha;
    const double sigma = sign_of(alpha);
    const double d1 = ctx.singularity().constants.d1;
    return {x_tilde[0] / std::sqrt(std::abs(alpha)), x_tilde[1] / (-sigma * d1) + ctx.z2_shift(),
            -sigma * x_tilde[2]};
}

Vec3 to_x_tilde(const TransformContext& ctx, const Vec3& point) {
    return scale(ctx, rectify(ctx, to_y(ctx, point)));
}

Vec3 from_x_tilde(const TransformContext& ctx, const Vec3& x_tilde) {
    return from_y(ctx, unrectify(ctx, unscale(ctx, x_tilde)));
}

Mat3 rectify_jacobian(const TransformContext& ctx, const Vec3& y) {
    const CurveFunctions L = curve_functions(ctx, y[2]);
    return {Vec3{1.0, 0.0, -L.dy1L}, Vec3{0.0, 1.0, -L.dy2L}, Vec3{0.0, 0.0, 1.0}};
}

Mat3 scale_jacobian(const TransformContext& ctx) {
    const double alpha = ctx.params().alpha;
    const double sigma = sign_of(alpha);
    const double d1 = ctx.singularity().constants.d1;
    return {Vec3{std::sqrt(std::abs(alpha)), 0.0, 0.0}, Vec3{0.0, -sigma * d1, 0.0}, Vec3{0.0, 0.0, -sigma}};
}

Mat3 to_x_tilde_jacobian(const TransformContext& ctx, const Vec3& point) {
    return multiply(scale_jacobian(ctx), rectify_jacobian(ctx, to_y(ctx, point)));
}

Vec3 blowup_field(const TwoFoldParams& p, const Vec3& point) {
    const double l = point[0];
    const double wp = 0.5 * (1.0 + l);
    const double wm = 0.5 * (1.0 - l);
    return {-wp * point[1] + wm * point[2] + p.alpha * (1.0 - l * l), wp * p.a1 + wm * p.b2, wp * p.b1 + wm * p.a2};
}

Vec3 folded_normal_field(double a_tilde, double b_tilde, double c_tilde, double epsilon, const Vec3& x_tilde,
                         TimeNormalization norm) {
    const double fast = x_tilde[1] + x_tilde[0] * x_tilde[0];
    return {norm == TimeNormalization::Fast ? fast : fast / epsilon, b_tilde * x_tilde[2] + c_tilde * x_tilde[0],
            a_tilde};
}

Vec3 equivalence_defect(const TransformContext& ctx, const Vec3& x_tilde) {
    const auto& p = ctx.params();
    const auto& k = ctx.singularity().constants;
    const double eps = ctx.epsilon();
    const double sigma = sign_of(p.alpha);

    const Vec3 point = from_x_tilde(ctx, x_tilde);
    const Vec3 f = blowup_field(p, point);
    const Mat3 jac = to_x_tilde_jacobian(ctx, point);
    // d/dt of (lambda, x2, x3) is (f1/eps, f2, f3); scaled time is -sign(alpha) t.
    const Vec3 pushed = (-sigma) * mat_vec(jac, Vec3{f[0] / eps, f[1], f[2]});

    const Vec3 normal = folded_normal_field(k.a_tilde, k.b_tilde, k.c_tilde, eps, x_tilde);
    return {pushed[0] * eps / std::sqrt(std::abs(p.alpha)) - normal[0], pushed[1] - normal[1], pushed[2] - normal[2]};
}

EquivalenceResidual equivalence_residual(const TransformContext& ctx, double h, int samples) {
    if (!(h > 0.0)) {
        throw ContractViolation("sample radius must be positive");
    }
    if (samples < 1) {
        throw ContractViolation("need at least one sample");
    }
    const TransformContext local = ctx.with_epsilon(h);
    EquivalenceResidual out;
    out.h = h;
    // Fibonacci lattice on the sphere of radius h.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
        const double zc = 1.0 - (2.0 * i + 1.0) / samples;
        const double rc = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const double phi = golden * i;
        const Vec3 x_tilde{h * rc * std::cos(phi), h * rc * std::sin(phi), h * zc};
        const Vec3 d = equivalence_defect(local, x_tilde);
        for (std::size_t r = 0; r < 3; ++r) {
            out.rows[r] = std::max(out.rows[r], std::abs(d[r]));
        }
    }
    out.combined = std::max({out.rows[0], out.rows[1], h * out.rows[2]});
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ContractViolation("slope fit needs two or more paired values");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log10(x[i]);
        const double ly = std::log10(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TransformCheck transform_check(const TwoFoldParams& p, const FoldedSingularity& singularity,
                               std::vector<double> h_values) {
    const TransformContext ctx(p, singularity, h_values.empty() ? 1.0 : h_values.front());
    TransformCheck out;
    out.params = p;
    out.singularity = singularity;
    out.h_values = std::move(h_values);
    std::vector<double> combined;
    for (const double h : out.h_values) {
        out.residuals.push_back(equivalence_residual(ctx, h));
        combined.push_back(out.residuals.back().combined);
    }
    out.slope = loglog_slope(out.h_values, combined);
    out.pass = std::abs(out.slope - kSlopeTarget) <= kSlopeTolerance;
    return out;
}

}  // namespace twofold
