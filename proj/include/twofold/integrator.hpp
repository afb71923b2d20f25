#pragma once

#include "twofold/field.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace twofold {

enum class ModeKind { FlowPlus, FlowMinus, Sliding, Layer };

enum class EventKind {
    Crossing,
    SlideEntry,
    SlideExit,
    TwoFoldHit,
    DeterminacyBreak,
    StepFloor,
    BoundaryExit,
    NonconvergentEvent,
};

enum class RunStatus { Completed, StepFloor, NonconvergentEvent, DeterminacyBreak, BoundaryExit };

std::string to_string(ModeKind mode);
std::string to_string(EventKind kind);
std::string to_string(RunStatus status);

struct Sample {
    double t = 0.0;
    Vec3 state{};
    /// Mode on the interval that starts here.
    ModeKind mode = ModeKind::FlowPlus;
    /// Set in Sliding and Layer modes, NaN otherwise.
    double lambda = std::numeric_limits<double>::quiet_NaN();
    /// Time derivative leaving this sample, and arriving at it (they differ at events).
    Vec3 rate{};
    Vec3 rate_before{};
};

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::Crossing;
    Vec3 state{};
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Event> events;
    RunStatus status = RunStatus::Completed;
    /// Seed used by a randomized repelling policy.
    std::optional<std::uint64_t> seed;

    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
    [[nodiscard]] const Sample& back() const { return samples.back(); }

    /// Cubic Hermite interpolation between stored samples; t must lie in the sampled span.
    [[nodiscard]] Vec3 dense(double t) const;

    [[nodiscard]] std::size_t count(EventKind kind) const;
};

enum class RepellingPolicyKind { StaySliding, EjectPlus, EjectMinus, EjectAt };

struct RepellingPolicy {
    RepellingPolicyKind kind = RepellingPolicyKind::StaySliding;
    /// EjectAt: leave the repelling slide at this time, side drawn from the run's seed.
    double eject_time = 0.0;
};

struct IntegratorOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-12;
    double event_tol = 1e-12;
    RepellingPolicy repelling_policy;
    std::uint64_t seed = 0;
    std::size_t max_steps = 10'000'000;  // ~1 GB of samples

    /// Throws ContractViolation on non-positive tolerances or min_step >= max_step.
    void validate() const;
};

inline constexpr double kTwoFoldHitTol = 1e-8;
inline constexpr int kMaxBisections = 200;
/// Near the surface steps are capped so the Hermite dense output stays tight.
inline constexpr double kNearSurfaceBand = 0.01;
inline constexpr double kNearSurfaceStep = 1e-3;

/// Dormand-Prince 5(4). t_end < t0 integrates backward; samples then run in decreasing t.
[[nodiscard]] Trajectory integrate_smooth(const SmoothField& field, const Vec3& x0, double t0, double t_end,
                                          const IntegratorOptions& opts = {});

/// Event-driven Filippov flow with sliding on x1 = 0.
[[nodiscard]] Trajectory integrate_filippov(const PiecewiseSmoothSystem& sys, const Vec3& x0, double t0,
                                            double t_end, const IntegratorOptions& opts = {});

enum class Sigmoid { Tanh, AlgebraicSqrt };

std::string to_string(Sigmoid sigmoid);
[[nodiscard]] Sigmoid parse_sigmoid(const std::string& name);
[[nodiscard]] double sigmoid_value(Sigmoid sigmoid, double u);

/// Smooth field f(x; phi(x1/eps)). Samples are labelled by the sign of x1 and
/// sign changes are logged as Crossing events.
[[nodiscard]] Trajectory integrate_smoothed(const PiecewiseSmoothSystem& sys, Sigmoid sigmoid, double epsilon,
                                            const Vec3& x0, double t0, double t_end,
                                            const IntegratorOptions& opts = {});

/// Layer flow in (lambda, x2, x3): dlambda/dt = f1/eps. Halts with BoundaryExit
/// when lambda reaches +-1 with f1 pointing outward.
[[nodiscard]] Trajectory integrate_blowup(const TwoFoldParams& p, double epsilon, const Vec3& start, double t0,
                                          double t_end, const IntegratorOptions& opts = {});

/// `t,x1,x2,x3,mode,lambda`; for blow-up runs the state columns hold (lambda, x2, x3).
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);
/// `t,kind,x1,x2,x3`
[[nodiscard]] std::string events_csv(const Trajectory& traj);

}  // namespace twofold
