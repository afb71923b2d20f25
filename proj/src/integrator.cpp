#include "twofold/integrator.hpp"

#include "twofold/detail/format.hpp"
#include "twofold/errors.hpp"
#include "twofold/sliding.hpp"
#include "twofold/transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace twofold {

std::string to_string(ModeKind mode) {
    switch (mode) {
        case ModeKind::FlowPlus: return "FlowPlus";
        case ModeKind::FlowMinus: return "FlowMinus";
        case ModeKind::Sliding: return "Sliding";
        case ModeKind::Layer: return "Layer";
    }
    return "?";
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Crossing: return "Crossing";
        case EventKind::SlideEntry: return "SlideEntry";
        case EventKind::SlideExit: return "SlideExit";
        case EventKind::TwoFoldHit: return "TwoFoldHit";
        case EventKind::DeterminacyBreak: return "DeterminacyBreak";
        case EventKind::StepFloor: return "StepFloor";
        case EventKind::BoundaryExit: return "BoundaryExit";
        case EventKind::NonconvergentEvent: return "NonconvergentEvent";
    }
    return "?";
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "Completed";
        case RunStatus::StepFloor: return "StepFloor";
        case RunStatus::NonconvergentEvent: return "NonconvergentEvent";
        case RunStatus::DeterminacyBreak: return "DeterminacyBreak";
        case RunStatus::BoundaryExit: return "BoundaryExit";
    }
    return "?";
}

std::string to_string(Sigmoid sigmoid) { return sigmoid == Sigmoid::Tanh ? "tanh" : "sqrt"; }

Sigmoid parse_sigmoid(const std::string& name) {
    if (name == "tanh") {
        return Sigmoid::Tanh;
    }
    if (name == "sqrt") {
        return Sigmoid::AlgebraicSqrt;
    }
    throw ContractViolation("unknown sigmoid '" + name + "' (tanh|sqrt)");
}

double sigmoid_value(Sigmoid sigmoid, double u) {
    if (sigmoid == Sigmoid::Tanh) {
        return std::tanh(u);
    }
    return u / std::sqrt(1.0 + u * u);
}

void IntegratorOptions::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(event_tol > 0.0) || !(min_step > 0.0)) {
        throw ContractViolation("tolerances and min_step must be positive");
    }
    if (!(min_step < max_step)) {
        throw ContractViolation("min_step must be below max_step");
    }
}

namespace {

Vec3 hermite(double t0, const Vec3& x0, const Vec3& k0, double t1, const Vec3& x1, const Vec3& k1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    Vec3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = h00 * x0[i] + h10 * h * k0[i] + h01 * x1[i] + h11 * h * k1[i];
    }
    return out;
}

using Rhs = std::function<Vec3(const Vec3&)>;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Trial {
    Vec3 x{};
    Vec3 k{};
    double err = 0.0;
};

Trial dp_trial(const Rhs& f, const Vec3& x, const Vec3& k1, double h, const IntegratorOptions& opts) {
    auto comb = [&](std::initializer_list<std::pair<double, const Vec3*>> terms) {
        Vec3 out = x;
        for (const auto& [a, k] : terms) {
            for (std::size_t i = 0; i < 3; ++i) {
                out[i] += h * a * (*k)[i];
            }
        }
        return out;
    };
    // blown-up stages become a rejected step, not a field error
    auto eval = [&](const Vec3& y) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        return all_finite(y) ? f(y) : Vec3{nan, nan, nan};
    };
    const Vec3 k2 = eval(comb({{a21, &k1}}));
    const Vec3 k3 = eval(comb({{a31, &k1}, {a32, &k2}}));
    const Vec3 k4 = eval(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec3 k5 = eval(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec3 k6 = eval(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    Trial trial;
    trial.x = comb({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    if (!all_finite(trial.x)) {
        trial.err = std::numeric_limits<double>::infinity();
        return trial;
    }
    trial.k = f(trial.x);
    double err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * trial.k[i]);
        const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(x[i]), std::abs(trial.x[i]));
        err = std::max(err, std::abs(e) / sc);
    }
    trial.err = all_finite(trial.k) ? err : std::numeric_limits<double>::infinity();
    return trial;
}

double initial_step(const Vec3& x, const Vec3& k, const IntegratorOptions& opts) {
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double sc = opts.abs_tol + opts.rel_tol * std::abs(x[i]);
        d0 = std::max(d0, std::abs(x[i]) / sc);
        d1 = std::max(d1, std::abs(k[i]) / sc);
    }
    const double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::clamp(h, opts.min_step * 10.0, 0.1);
}

/// g >= 0 on the current side; an event fires when g < 0 at a step end.
struct EventFn {
    std::function<double(const Vec3&)> g;
    int id = 0;
};

struct SegmentEnd {
    enum class Outcome { ReachedEnd, Event, Floor, Nonconvergent, TooManySteps } outcome = Outcome::ReachedEnd;
    double t = 0.0;
    Vec3 x{};
    Vec3 k{};  // rate of the segment's field at x
    int event_id = -1;
};

class Engine {
public:
    Engine(const IntegratorOptions& opts, Trajectory& traj) : opts_(opts), traj_(traj) {}

    /// Advances from the last sample of traj with field f; every accepted interior
    /// step is appended through `label`. The end point is left to the caller.
    SegmentEnd run(const Rhs& f, double t_end, const std::vector<EventFn>& events,
                   const std::function<double(const Vec3&)>& cap,
                   const std::function<void(Sample&)>& label,
                   const std::function<bool(const Vec3&)>& stop = nullptr) {
        double t = traj_.back().t;
        Vec3 x = traj_.back().state;
        Vec3 k = f(x);
        traj_.samples.back().rate = k;
        const double dir = t_end >= t ? 1.0 : -1.0;
        double h = initial_step(x, k, opts_);
        SegmentEnd end;
        while (true) {
            const double remaining = std::abs(t_end - t);
            if (remaining <= 1e-15 * std::max(1.0, std::abs(t_end))) {
                end.outcome = SegmentEnd::Outcome::ReachedEnd;
                break;
            }
            if (++steps_ > opts_.max_steps) {
                end.outcome = SegmentEnd::Outcome::TooManySteps;
                end.t = t;
                end.x = x;
                end.k = k;
                return end;
            }
            double limit = std::min({opts_.max_step, cap ? cap(x) : opts_.max_step});
            h = std::min(h, limit);
            bool last = false;
            if (h >= remaining) {
                h = remaining;
                last = true;
            }
            Trial trial;
            while (true) {
                trial = dp_trial(f, x, k, dir * h, opts_);
                if (trial.err <= 1.0) {
                    break;
                }
                const double factor =
                    std::isfinite(trial.err) ? std::clamp(0.9 * std::pow(trial.err, -0.2), 0.2, 1.0) : 0.2;
                h *= factor;
                last = false;
                if (h < opts_.min_step) {
                    end.outcome = SegmentEnd::Outcome::Floor;
                    end.t = t;
                    end.x = x;
                    end.k = k;
                    return end;
                }
            }
            const double t_new = last ? t_end : t + dir * h;

            // Earliest event in (t, t_new].
            int hit = -1;
            double t_hit = 0.0;
            Vec3 x_hit{};
            for (const auto& ev : events) {
                if (!(ev.g(trial.x) < 0.0)) {
                    continue;
                }
                const auto located = locate(ev, t, x, k, t_new, trial.x, trial.k);
                if (!located) {
                    end.outcome = SegmentEnd::Outcome::Nonconvergent;
                    end.t = t;
                    end.x = x;
                    end.k = k;
                    return end;
                }
                if (hit < 0 || dir * (located->first - t_hit) < 0.0) {
                    hit = ev.id;
                    t_hit = located->first;
                    x_hit = located->second;
                }
            }
            if (hit >= 0) {
                end.outcome = SegmentEnd::Outcome::Event;
                end.t = t_hit;
                end.x = x_hit;
                end.k = f(x_hit);
                end.event_id = hit;
                return end;
            }

            const double err = std::max(trial.err, 1e-10);
            h = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            t = t_new;
            x = trial.x;
            k = trial.k;
            if (last) {
                end.outcome = SegmentEnd::Outcome::ReachedEnd;
                break;
            }
            Sample s;
            s.t = t;
            s.state = x;
            s.rate = k;
            s.rate_before = k;
            label(s);
            traj_.samples.push_back(s);
            if (stop && stop(x)) {
                end.outcome = SegmentEnd::Outcome::Event;
                end.event_id = -2;
                end.t = t;
                end.x = x;
                end.k = k;
                traj_.samples.pop_back();
                return end;
            }
        }
        end.t = t_end;
        end.x = x;
        end.k = k;
        return end;
    }

private:
    // Bisection on the step's Hermite interpolant; the returned point is already across.
    std::optional<std::pair<double, Vec3>> locate(const EventFn& ev, double t0, const Vec3& x0, const Vec3& k0,
                                                  double t1, const Vec3& x1, const Vec3& k1) const {
        double lo = t0;
        double hi = t1;
        Vec3 x_hi = x1;
        for (int it = 0; it < kMaxBisections; ++it) {
            if (std::abs(ev.g(x_hi)) <= opts_.event_tol) {
                return std::make_pair(hi, x_hi);
            }
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) {
                break;
            }
            const Vec3 xm = hermite(t0, x0, k0, t1, x1, k1, mid);
            if (ev.g(xm) < 0.0) {
                hi = mid;
                x_hi = xm;
            } else {
                lo = mid;
            }
        }
        return std::nullopt;
    }

    const IntegratorOptions& opts_;
    Trajectory& traj_;
    std::size_t steps_ = 0;
};

void log_event(Trajectory& traj, double t, EventKind kind, const Vec3& x) { traj.events.push_back({t, kind, x}); }

Sample make_sample(double t, const Vec3& x, ModeKind mode, const Vec3& rate_before, const Vec3& rate,
                   double lambda = std::numeric_limits<double>::quiet_NaN()) {
    Sample s;
    s.t = t;
    s.state = x;
    s.mode = mode;
    s.lambda = lambda;
    s.rate = rate;
    s.rate_before = rate_before;
    return s;
}

RunStatus status_for(SegmentEnd::Outcome outcome) {
    switch (outcome) {
        case SegmentEnd::Outcome::Floor:
        case SegmentEnd::Outcome::TooManySteps: return RunStatus::StepFloor;
        case SegmentEnd::Outcome::Nonconvergent: return RunStatus::NonconvergentEvent;
        default: return RunStatus::Completed;
    }
}

// Closes a run that stopped for a numerical reason.
void fail(Trajectory& traj, const SegmentEnd& end) {
    traj.status = status_for(end.outcome);
    log_event(traj, end.t,
              traj.status == RunStatus::NonconvergentEvent ? EventKind::NonconvergentEvent : EventKind::StepFloor,
              end.x);
}

void check_inputs(const Vec3& x0, double t0, double t_end, const IntegratorOptions& opts) {
    opts.validate();
    if (!all_finite(x0) || !std::isfinite(t0) || !std::isfinite(t_end)) {
        throw ContractViolation("non-finite initial state or time span");
    }
}

}  // namespace

Vec3 Trajectory::dense(double t) const {
    if (samples.empty()) {
        throw ContractViolation("dense output of an empty trajectory");
    }
    const bool forward = samples.size() < 2 || samples.back().t >= samples.front().t;
    auto before = [forward](double a, double b) { return forward ? a < b : a > b; };
    if (before(t, samples.front().t) || before(samples.back().t, t)) {
        throw ContractViolation("t outside the sampled span");
    }
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [&](const Sample& s, double value) { return before(s.t, value); });
    if (it->t == t) {
        return it->state;
    }
    const Sample& right = *it;
    const Sample& left = *(it - 1);
    return hermite(left.t, left.state, left.rate, right.t, right.state, right.rate_before, t);
}

std::size_t Trajectory::count(EventKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [kind](const Event& e) { return e.kind == kind; }));
}

Trajectory integrate_smooth(const SmoothField& field, const Vec3& x0, double t0, double t_end,
                            const IntegratorOptions& opts) {
    check_inputs(x0, t0, t_end, opts);
    Trajectory traj;
    const Rhs f = [&field](const Vec3& x) { return field(x); };
    const Vec3 k0 = f(x0);
    traj.samples.push_back(make_sample(t0, x0, ModeKind::FlowPlus, k0, k0));
    Engine engine(opts, traj);
    const SegmentEnd end = engine.run(f, t_end, {}, nullptr, [](Sample&) {});
    if (end.outcome != SegmentEnd::Outcome::ReachedEnd) {
        fail(traj, end);
        return traj;
    }
    if (end.t != traj.back().t) {
        traj.samples.push_back(make_sample(end.t, end.x, ModeKind::FlowPlus, end.k, end.k));
    }
    return traj;
}

namespace {

struct FilippovRun {
    const PiecewiseSmoothSystem& sys;
    const IntegratorOptions& opts;
    double t_end;
    Trajectory traj;
    std::mt19937_64 rng;
    double lambda_prev = 0.0;

    enum Side { Plus = 0, Minus = 1, Fold = 2, SignPlus = 3, SignMinus = 4 };

    Vec3 flow(ModeKind mode, const Vec3& x) const {
        return mode == ModeKind::FlowPlus ? sys.f_plus(x) : sys.f_minus(x);
    }

    // f1 = A l^2 + B l + C on the surface. The root with f1' = -sqrt(disc)
    // is the attracting one, +sqrt(disc) the repelling one; at most one each.
    struct Quadratic {
        double a, b, c, disc;
    };

    Quadratic quadratic(const Vec3& x) const {
        const FieldSplit v = split(sys, {0.0, x[1], x[2]});
        const double a = -v.hidden[0];
        const double b = 0.5 * (v.plus[0] - v.minus[0]);
        const double c = 0.5 * (v.plus[0] + v.minus[0]) + v.hidden[0];
        return {a, b, c, b * b - 4.0 * a * c};
    }

    // Unrestricted branch root, so the exit at +-1 can be located; none past a fold.
    static std::optional<double> branch_root(const Quadratic& q, Stability want) {
        if (q.disc < 0.0) {
            return std::nullopt;
        }
        const double s = want == Stability::Attracting ? 1.0 : -1.0;
        const double root = std::sqrt(q.disc);
        if (q.b * s >= 0.0) {
            if (q.a == 0.0) {
                return std::nullopt;
            }
            return (-q.b - s * root) / (2.0 * q.a);
        }
        return 2.0 * q.c / (-q.b + s * root);
    }

    std::optional<double> slide_lambda(const Vec3& x, Stability want) const {
        const auto l = branch_root(quadratic(x), want);
        if (!l) {
            return std::nullopt;
        }
        return std::clamp(*l, -1.0, 1.0);
    }

    Vec3 slide_rate(const Vec3& x, Stability want) const {
        auto lam = slide_lambda(x, want);
        if (!lam) {
            // just past a fold of the slide branch: keep the last value
            lam = lambda_prev;
        }
        const Vec3 f = eval_combination(sys, {0.0, x[1], x[2]}, *lam);
        return {0.0, f[1], f[2]};
    }

    bool at_two_fold(const Vec3& x) const {
        const Vec3 p{0.0, x[1], x[2]};
        return std::abs(sys.f_plus.component(0, p)) < kTwoFoldHitTol &&
               std::abs(sys.f_minus.component(0, p)) < kTwoFoldHitTol;
    }

    void determinacy_break(double t, const Vec3& x) {
        log_event(traj, t, EventKind::TwoFoldHit, x);
        log_event(traj, t, EventKind::DeterminacyBreak, x);
        traj.status = RunStatus::DeterminacyBreak;
    }

    /// Flow mode chosen at a surface point, or Sliding with stability.
    struct Decision {
        ModeKind mode = ModeKind::FlowPlus;
        Stability stability = Stability::Attracting;
        bool two_fold = false;
    };

    Decision decide(const Vec3& x, double t) {
        Decision d;
        if (at_two_fold(x)) {
            d.two_fold = true;
            return d;
        }
        const Vec3 p{0.0, x[1], x[2]};
        const double s_plus = sys.f_plus.component(0, p);
        const double s_minus = sys.f_minus.component(0, p);
        switch (region_classify(s_plus, s_minus)) {
            case RegionClass::Crossing:
                d.mode = s_plus > 0.0 ? ModeKind::FlowPlus : ModeKind::FlowMinus;
                break;
            case RegionClass::Tangency: {
                const double nonzero = std::abs(s_plus) > std::abs(s_minus) ? s_plus : s_minus;
                d.mode = nonzero > 0.0 ? ModeKind::FlowPlus : ModeKind::FlowMinus;
                break;
            }
            case RegionClass::AttractingSliding:
                d.mode = ModeKind::Sliding;
                d.stability = Stability::Attracting;
                break;
            case RegionClass::RepellingSliding:
                d.mode = ModeKind::Sliding;
                d.stability = Stability::Repelling;
                switch (opts.repelling_policy.kind) {
                    case RepellingPolicyKind::StaySliding: break;
                    case RepellingPolicyKind::EjectPlus: d.mode = ModeKind::FlowPlus; break;
                    case RepellingPolicyKind::EjectMinus: d.mode = ModeKind::FlowMinus; break;
                    case RepellingPolicyKind::EjectAt:
                        if (t >= opts.repelling_policy.eject_time) {
                            d.mode = eject_side();
                        }
                        break;
                }
                break;
        }
        return d;
    }

    ModeKind eject_side() {
        traj.seed = opts.seed;
        return std::bernoulli_distribution(0.5)(rng) ? ModeKind::FlowPlus : ModeKind::FlowMinus;
    }

    double sample_lambda(const Vec3& x, Stability want) {
        const auto lam = slide_lambda(x, want);
        if (lam) {
            lambda_prev = *lam;
        }
        return lambda_prev;
    }

    void run(const Vec3& x0, double t0) {
        Engine engine(opts, traj);
        Vec3 x = x0;
        double t = t0;
        Decision d;
        if (x[0] > 0.0) {
            d.mode = ModeKind::FlowPlus;
        } else if (x[0] < 0.0) {
            d.mode = ModeKind::FlowMinus;
        } else {
            d = decide(x, t);
        }
        {
            const Vec3 k = d.mode == ModeKind::Sliding ? slide_rate(x, d.stability) : flow(d.mode, x);
            const double lam = d.mode == ModeKind::Sliding ? sample_lambda(x, d.stability)
                                                           : std::numeric_limits<double>::quiet_NaN();
            traj.samples.push_back(make_sample(t, x, d.mode, k, k, lam));
        }
        if (d.two_fold) {
            determinacy_break(t, x);
            return;
        }
        int stalls = 0;
        while (true) {
            const ModeKind mode = d.mode;
            const Stability stab = d.stability;
            SegmentEnd end;
            Rhs f;
            if (mode == ModeKind::Sliding) {
                f = [this, stab](const Vec3& y) { return slide_rate(y, stab); };
                // The tracked root leaves through lambda = +-1, or meets its twin on L.
                // With a hidden term it can outlive the sign pattern of f1+ and f1-.
                auto root = [this, stab](const Vec3& y) {
                    const Quadratic q = quadratic(y);
                    return branch_root({q.a, q.b, q.c, std::max(q.disc, 0.0)}, stab).value_or(0.0);
                };
                std::vector<EventFn> events{
                    {[root](const Vec3& y) { return 1.0 - root(y); }, Plus},
                    {[root](const Vec3& y) { return root(y) + 1.0; }, Minus},
                    {[this](const Vec3& y) { return quadratic(y).disc; }, Fold},
                };
                // Sign flips of f1+- are watched too: the two-fold is reached through them
                // while the tracked root can stay inside (-1, 1).
                const Vec3 p0{0.0, traj.back().state[1], traj.back().state[2]};
                const double expect = stab == Stability::Attracting ? 1.0 : -1.0;
                auto orient = [](double v, double fallback) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : fallback); };
                const double op = orient(sys.f_plus.component(0, p0), -expect);
                const double om = orient(sys.f_minus.component(0, p0), expect);
                events.push_back({[this, op](const Vec3& y) { return op * sys.f_plus.component(0, {0.0, y[1], y[2]}); },
                                  SignPlus});
                events.push_back({[this, om](const Vec3& y) { return om * sys.f_minus.component(0, {0.0, y[1], y[2]}); },
                                  SignMinus});
                double seg_end = t_end;
                const bool timed_eject = stab == Stability::Repelling &&
                                         opts.repelling_policy.kind == RepellingPolicyKind::EjectAt &&
                                         opts.repelling_policy.eject_time < t_end;
                if (timed_eject) {
                    seg_end = opts.repelling_policy.eject_time;
                }
                end = engine.run(
                    f, seg_end, events, nullptr,
                    [this, stab](Sample& s) {
                        s.mode = ModeKind::Sliding;
                        s.lambda = sample_lambda(s.state, stab);
                    },
                    [this](const Vec3& y) { return at_two_fold(y); });
                if (end.outcome == SegmentEnd::Outcome::ReachedEnd && timed_eject) {
                    const ModeKind side = eject_side();
                    const Vec3 xe{0.0, end.x[1], end.x[2]};
                    const Vec3 k = flow(side, xe);
                    traj.samples.push_back(make_sample(end.t, xe, side, end.k, k));
                    log_event(traj, end.t, EventKind::SlideExit, xe);
                    t = end.t;
                    d = Decision{side, stab, false};
                    continue;
                }
            } else {
                f = [this, mode](const Vec3& y) { return flow(mode, y); };
                const double side = mode == ModeKind::FlowPlus ? 1.0 : -1.0;
                std::vector<EventFn> events{{[side](const Vec3& y) { return side * y[0]; }, 0}};
                end = engine.run(
                    f, t_end, events,
                    [this](const Vec3& y) {
                        return std::abs(y[0]) < kNearSurfaceBand ? kNearSurfaceStep : opts.max_step;
                    },
                    [mode](Sample& s) { s.mode = mode; });
            }

            if (end.outcome == SegmentEnd::Outcome::ReachedEnd) {
                if (end.t != traj.back().t) {
                    Sample s = make_sample(end.t, end.x, mode, end.k, end.k);
                    if (mode == ModeKind::Sliding) {
                        s.lambda = sample_lambda(end.x, stab);
                    }
                    traj.samples.push_back(s);
                }
                return;
            }
            if (end.outcome != SegmentEnd::Outcome::Event) {
                fail(traj, end);
                return;
            }

            // On the surface: project and decide what comes next.
            const Vec3 xe{0.0, end.x[1], end.x[2]};
            stalls = std::abs(end.t - t) <= 1e-13 * std::max(1.0, std::abs(t)) ? stalls + 1 : 0;
            t = end.t;
            if (stalls > 8) {
                SegmentEnd stuck = end;
                stuck.outcome = SegmentEnd::Outcome::Floor;
                traj.samples.push_back(make_sample(t, xe, mode, end.k, end.k, traj.back().lambda));
                fail(traj, stuck);
                return;
            }
            if (end.event_id == -2 || at_two_fold(xe)) {
                traj.samples.push_back(make_sample(t, xe, mode, end.k, end.k,
                                                   mode == ModeKind::Sliding ? lambda_prev : traj.back().lambda));
                determinacy_break(t, xe);
                return;
            }
            Decision next;
            EventKind kind = EventKind::Crossing;
            if (mode == ModeKind::Sliding && (end.event_id == SignPlus || end.event_id == SignMinus)) {
                // Not an exit by itself; the slide goes on along the same branch.
                traj.samples.push_back(make_sample(t, xe, mode, end.k, end.k, sample_lambda(xe, stab)));
                continue;
            }
            if (mode == ModeKind::Sliding && end.event_id != Fold) {
                // Tangential exit where lambda reaches the +-1 end.
                next.mode = end.event_id == Plus ? ModeKind::FlowPlus : ModeKind::FlowMinus;
                kind = EventKind::SlideExit;
            } else if (mode == ModeKind::Sliding) {
                // Branch folded away; past L f1 takes the sign of its l^2 term.
                next.mode = quadratic(xe).a > 0.0 ? ModeKind::FlowPlus : ModeKind::FlowMinus;
                kind = EventKind::SlideExit;
            } else {
                next = decide(xe, t);
                if (next.two_fold) {
                    traj.samples.push_back(make_sample(t, xe, mode, end.k, end.k));
                    determinacy_break(t, xe);
                    return;
                }
                kind = next.mode == ModeKind::Sliding ? EventKind::SlideEntry : EventKind::Crossing;
                if (next.mode == ModeKind::Sliding) {
                    lambda_prev = mode == ModeKind::FlowPlus ? 1.0 : -1.0;
                }
            }
            const Vec3 k = next.mode == ModeKind::Sliding ? slide_rate(xe, next.stability) : flow(next.mode, xe);
            const double lam = next.mode == ModeKind::Sliding ? sample_lambda(xe, next.stability)
                                                              : std::numeric_limits<double>::quiet_NaN();
            traj.samples.push_back(make_sample(t, xe, next.mode, end.k, k, lam));
            // The log keeps the located point; the sample is projected onto x1 = 0.
            if (next.mode != mode || kind != EventKind::Crossing) {
                log_event(traj, t, kind, end.x);
            }
            d = next;
        }
    }
};

}  // namespace

Trajectory integrate_filippov(const PiecewiseSmoothSystem& sys, const Vec3& x0, double t0, double t_end,
                              const IntegratorOptions& opts) {
    check_inputs(x0, t0, t_end, opts);
    if (t_end < t0) {
        throw ContractViolation("Filippov integration runs forward only");
    }
    FilippovRun run{sys, opts, t_end, {}, std::mt19937_64(opts.seed)};
    run.run(x0, t0);
    return std::move(run.traj);
}

Trajectory integrate_smoothed(const PiecewiseSmoothSystem& sys, Sigmoid sigmoid, double epsilon, const Vec3& x0,
                              double t0, double t_end, const IntegratorOptions& opts) {
    check_inputs(x0, t0, t_end, opts);
    if (!(epsilon > 0.0)) {
        throw ContractViolation("epsilon must be positive");
    }
    if (t_end < t0) {
        throw ContractViolation("smoothed integration runs forward only");
    }
    const Rhs f = [&](const Vec3& x) { return eval_combination(sys, x, sigmoid_value(sigmoid, x[0] / epsilon)); };
    Trajectory traj;
    ModeKind mode = x0[0] >= 0.0 ? ModeKind::FlowPlus : ModeKind::FlowMinus;
    const Vec3 k0 = f(x0);
    traj.samples.push_back(make_sample(t0, x0, mode, k0, k0));
    Engine engine(opts, traj);
    while (true) {
        const double side = mode == ModeKind::FlowPlus ? 1.0 : -1.0;
        std::vector<EventFn> events{{[side](const Vec3& y) { return side * y[0]; }, 0}};
        const SegmentEnd end = engine.run(f, t_end, events, nullptr, [mode](Sample& s) { s.mode = mode; });
        if (end.outcome == SegmentEnd::Outcome::ReachedEnd) {
            if (end.t != traj.back().t) {
                traj.samples.push_back(make_sample(end.t, end.x, mode, end.k, end.k));
            }
            return traj;
        }
        if (end.outcome != SegmentEnd::Outcome::Event) {
            fail(traj, end);
            return traj;
        }
        mode = mode == ModeKind::FlowPlus ? ModeKind::FlowMinus : ModeKind::FlowPlus;
        traj.samples.push_back(make_sample(end.t, end.x, mode, end.k, end.k));
        log_event(traj, end.t, EventKind::Crossing, end.x);
    }
}

Trajectory integrate_blowup(const TwoFoldParams& p, double epsilon, const Vec3& start, double t0, double t_end,
                            const IntegratorOptions& opts) {
    check_inputs(start, t0, t_end, opts);
    p.validate();
    if (!(epsilon > 0.0)) {
        throw ContractViolation("epsilon must be positive");
    }
    if (start[0] < -1.0 || start[0] > 1.0) {
        throw ContractViolation("lambda_0 must lie in [-1, 1]");
    }
    if (t_end < t0) {
        throw ContractViolation("blow-up integration runs forward only");
    }
    const Rhs f = [&p, epsilon](const Vec3& y) {
        Vec3 v = blowup_field(p, y);
        v[0] /= epsilon;
        return v;
    };
    auto outward = [&](const Vec3& y) {
        const double f1 = blowup_field(p, y)[0];
        return (y[0] >= 1.0 && f1 > 0.0) || (y[0] <= -1.0 && f1 < 0.0);
    };
    Trajectory traj;
    const Vec3 k0 = f(start);
    traj.samples.push_back(make_sample(t0, start, ModeKind::Layer, k0, k0, start[0]));
    if (outward(start)) {
        log_event(traj, t0, EventKind::BoundaryExit, start);
        traj.status = RunStatus::BoundaryExit;
        return traj;
    }
    Engine engine(opts, traj);
    while (true) {
        // At an end with inward (or zero) f1 the boundary holds lambda back.
        std::vector<EventFn> events{{[](const Vec3& y) { return 1.0 - y[0]; }, 0},
                                    {[](const Vec3& y) { return y[0] + 1.0; }, 1}};
        const SegmentEnd end =
            engine.run(f, t_end, events, nullptr, [](Sample& s) {
                s.mode = ModeKind::Layer;
                s.lambda = s.state[0];
            });
        if (end.outcome == SegmentEnd::Outcome::ReachedEnd) {
            if (end.t != traj.back().t) {
                traj.samples.push_back(make_sample(end.t, end.x, ModeKind::Layer, end.k, end.k, end.x[0]));
            }
            return traj;
        }
        if (end.outcome != SegmentEnd::Outcome::Event) {
            fail(traj, end);
            return traj;
        }
        Vec3 y = end.x;
        y[0] = end.event_id == 0 ? 1.0 : -1.0;
        const Vec3 k = f(y);
        traj.samples.push_back(make_sample(end.t, y, ModeKind::Layer, end.k, k, y[0]));
        if (outward(y) || blowup_field(p, y)[0] == 0.0) {
            log_event(traj, end.t, EventKind::BoundaryExit, y);
            traj.status = RunStatus::BoundaryExit;
            return traj;
        }
    }
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,x1,x2,x3,mode,lambda\n";
    for (const auto& s : traj.samples) {
        out << detail::format_double(s.t) << ',' << detail::format_double(s.state[0]) << ','
            << detail::format_double(s.state[1]) << ',' << detail::format_double(s.state[2]) << ','
            << to_string(s.mode) << ',';
        if ((s.mode == ModeKind::Sliding || s.mode == ModeKind::Layer) && !std::isnan(s.lambda)) {
            out << detail::format_double(s.lambda);
        }
        out << '\n';
    }
    return out.str();
}

std::string events_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,kind,x1,x2,x3\n";
    for (const auto& e : traj.events) {
        out << detail::format_double(e.t) << ',' << to_string(e.kind) << ',' << detail::format_double(e.state[0])
            << ',' << detail::format_double(e.state[1]) << ',' << detail::format_double(e.state[2]) << '\n';
    }
    return out.str();
}

}  // namespace twofold
