#include "twofold/cli.hpp"

#include "twofold/errors.hpp"
#include "twofold/report.hpp"
#include "twofold/scenarios.hpp"
#include "twofold/singularity.hpp"
#include "twofold/sliding.hpp"
#include "twofold/svg.hpp"
#include "twofold/transform.hpp"
#include "twofold/detail/format.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace twofold::cli {

namespace {

/// Bad flag values and missing inputs.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration stopped early; carries the event-log tail.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SystemArgs {
    std::optional<int> a1, a2;
    std::optional<double> b1, b2, alpha;
    std::string config;
    std::string scenario;
};

struct RunArgs {
    std::optional<double> epsilon;
    std::optional<double> t_end;
    std::string x0;
    std::string sigmoid;
    std::string policy = "stay";
    std::optional<double> eject_at;
    std::string method = "smoothed";
    std::string out;
    std::string events;
    std::string plot;
    std::uint64_t seed = 0;
    std::size_t max_steps = IntegratorOptions{}.max_steps;
};

void add_system_options(CLI::App* cmd, SystemArgs& s) {
    cmd->add_option("--a1", s.a1, "normal-form a1 (+-1)");
    cmd->add_option("--a2", s.a2, "normal-form a2 (+-1)");
    cmd->add_option("--b1", s.b1, "normal-form b1");
    cmd->add_option("--b2", s.b2, "normal-form b2");
    cmd->add_option("--alpha", s.alpha, "hidden-term coefficient");
    cmd->add_option("--config", s.config, "system config JSON");
    cmd->add_option("--scenario", s.scenario, "builtin scenario name");
}

bool any_param(const SystemArgs& s) { return s.a1 || s.a2 || s.b1 || s.b2 || s.alpha; }

Scenario resolve_scenario(const SystemArgs& s) {
    const int sources = (any_param(s) ? 1 : 0) + (s.config.empty() ? 0 : 1) + (s.scenario.empty() ? 0 : 1);
    if (sources == 0) {
        throw UsageError("give --a1 --a2 --b1 --b2 --alpha, --config or --scenario");
    }
    if (sources > 1) {
        throw UsageError("--a1.. flags, --config and --scenario are exclusive");
    }
    if (!s.scenario.empty()) {
        try {
            return builtin(s.scenario);
        } catch (const ContractViolation& e) {
            throw UsageError(std::string("--scenario: ") + e.what());
        }
    }
    if (!s.config.empty()) {
        return load_config(s.config);
    }
    const std::pair<const char*, bool> flags[] = {
        {"--a1", s.a1.has_value()}, {"--a2", s.a2.has_value()}, {"--b1", s.b1.has_value()},
        {"--b2", s.b2.has_value()}, {"--alpha", s.alpha.has_value()}};
    for (const auto& [name, given] : flags) {
        if (!given) {
            throw UsageError(std::string("missing ") + name);
        }
    }
    TwoFoldParams p{*s.a1, *s.a2, *s.b1, *s.b2, *s.alpha};
    if ((p.a1 != 1 && p.a1 != -1) || (p.a2 != 1 && p.a2 != -1)) {
        throw UsageError("--a1 and --a2 must be 1 or -1");
    }
    Scenario sc;
    sc.name = "normal-form";
    sc.system = normal_form_system(p);
    sc.sim.t_end = 10.0;
    sc.sim.x0 = {0.0, 1.0, 1.0};
    return sc;
}

TwoFoldParams resolve_params(const SystemArgs& s) {
    const Scenario sc = resolve_scenario(s);
    if (!sc.system.normal_form) {
        throw UsageError("this command needs normal-form constants (--a1.. or a params config)");
    }
    return *sc.system.normal_form;
}

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw UsageError(flag + ": not a number '" + item + "'");
        }
    }
    if (values.size() != n) {
        throw UsageError(flag + ": expected " + std::to_string(n) + " comma-separated values");
    }
    return values;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw std::runtime_error("cannot write " + path);
    }
    file << text;
}

IntegratorOptions options_for(const RunArgs& r) {
    IntegratorOptions opts;
    opts.seed = r.seed;
    opts.max_steps = r.max_steps;
    if (r.policy == "stay") {
        opts.repelling_policy.kind = RepellingPolicyKind::StaySliding;
    } else if (r.policy == "eject-plus") {
        opts.repelling_policy.kind = RepellingPolicyKind::EjectPlus;
    } else if (r.policy == "eject-minus") {
        opts.repelling_policy.kind = RepellingPolicyKind::EjectMinus;
    } else {
        throw UsageError("--policy: expected stay|eject-plus|eject-minus");
    }
    if (r.eject_at) {
        opts.repelling_policy.kind = RepellingPolicyKind::EjectAt;
        opts.repelling_policy.eject_time = *r.eject_at;
    }
    return opts;
}

void finish_run(const Trajectory& traj, const RunArgs& r, const PlotStyle& style, std::ostream& out) {
    if (!r.out.empty()) {
        save_run(traj, r.out, r.events);
    } else if (!r.events.empty()) {
        write_text(r.events, events_csv(traj), out);
    }
    if (!r.plot.empty()) {
        write_text(r.plot, emit_plot(traj, style), out);
    }
    out << run_summary(traj);
    if (traj.status == RunStatus::StepFloor || traj.status == RunStatus::NonconvergentEvent) {
        std::ostringstream tail;
        tail << "integration stopped: " << to_string(traj.status) << "\nlast events:\n";
        const std::size_t from = traj.events.size() > 5 ? traj.events.size() - 5 : 0;
        for (std::size_t i = from; i < traj.events.size(); ++i) {
            const auto& e = traj.events[i];
            tail << "  t=" << detail::format_double(e.t) << ' ' << to_string(e.kind) << " x=("
                 << detail::format_double(e.state[0]) << ", " << detail::format_double(e.state[1]) << ", "
                 << detail::format_double(e.state[2]) << ")\n";
        }
        throw NumericalFailure(tail.str());
    }
}

void add_run_options(CLI::App* cmd, RunArgs& r) {
    cmd->add_option("--epsilon", r.epsilon, "smoothing / layer scale");
    cmd->add_option("--t-end", r.t_end, "final time");
    cmd->add_option("--x0", r.x0, "initial state f,f,f");
    cmd->add_option("--out", r.out, "trajectory CSV");
    cmd->add_option("--events", r.events, "event CSV");
    cmd->add_option("--plot", r.plot, "SVG plot");
    cmd->add_option("--seed", r.seed, "seed for randomized policies");
    cmd->add_option("--max-steps", r.max_steps, "accepted-step budget; each step keeps a sample")
        ->check(CLI::PositiveNumber);
}

std::string sweep_csv(const TwoFoldParams& base, double lo, double hi, int steps) {
    const std::size_t n = static_cast<std::size_t>(steps) * static_cast<std::size_t>(steps);
    std::vector<std::string> rows(n);
    auto coordinate = [&](int i) { return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1); };
    auto cell = [&](std::size_t idx) {
        TwoFoldParams p = base;
        p.b1 = coordinate(static_cast<int>(idx % static_cast<std::size_t>(steps)));
        p.b2 = coordinate(static_cast<int>(idx / static_cast<std::size_t>(steps)));
        const TwoFoldFlavor flavor = classify_two_fold(p);
        std::string types;
        std::size_t count = 0;
        try {
            const auto list = folded_singularities(p);
            count = list.size();
            for (std::size_t k = 0; k < list.size(); ++k) {
                types += (k ? ";" : "") + to_string(list[k].classification.type);
            }
        } catch (const SingularityError& e) {
            types = "error";
        }
        rows[idx] = detail::format_double(p.b1) + ',' + detail::format_double(p.b2) + ',' + to_string(flavor.tag) +
                    ',' + (flavor.determinacy_breaking ? "true" : "false") + ',' + std::to_string(count) + ',' +
                    types + '\n';
    };
    const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t idx = w; idx < n; idx += workers) {
                cell(idx);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    std::string out = "b1,b2,flavor,determinacy_breaking,n_singularities,types\n";
    for (const auto& r : rows) {
        out += r;
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-fold singularity toolkit", "twofold"};
    app.require_subcommand(1);

    SystemArgs sys;
    RunArgs runargs;
    std::string out_path;
    std::string plot_path;
    std::string curve_out;
    std::string range = "-1,1";
    int steps = 41;

    auto* classify = app.add_subcommand("classify", "flavor, determinacy breaking and folded singularities");
    add_system_options(classify, sys);
    classify->add_option("--out", out_path, "JSON report");

    auto* singular = app.add_subcommand("singularity", "folded singularities with constants and type");
    add_system_options(singular, sys);
    singular->add_option("--out", out_path, "JSON report");

    auto* slide = app.add_subcommand("slide-map", "sliding region map on the switching surface");
    add_system_options(slide, sys);
    slide->add_option("--out", out_path, "region CSV");
    slide->add_option("--plot", plot_path, "SVG plot");
    slide->add_option("--curve-out", curve_out, "curve L CSV (normal form only)");
    slide->add_option("--range", range, "lo,hi for x2 and x3");
    slide->add_option("--steps", steps, "grid points per axis");

    auto* simulate = app.add_subcommand("simulate", "smoothed or Filippov simulation");
    add_system_options(simulate, sys);
    add_run_options(simulate, runargs);
    simulate->add_option("--sigmoid", runargs.sigmoid, "tanh|sqrt");
    simulate->add_option("--method", runargs.method, "smoothed|filippov");
    simulate->add_option("--policy", runargs.policy, "stay|eject-plus|eject-minus");
    simulate->add_option("--eject-at", runargs.eject_at, "leave repelling slides at this time");

    auto* blowup = app.add_subcommand("blowup", "layer flow in (lambda, x2, x3); --x0 is (lambda0, x2, x3)");
    add_system_options(blowup, sys);
    add_run_options(blowup, runargs);

    auto* tcheck = app.add_subcommand("transform-check", "order check of the normal-form equivalence");
    add_system_options(tcheck, sys);
    tcheck->add_option("--out", out_path, "JSON report");

    auto* sweep = app.add_subcommand("sweep", "grid over (b1, b2) at fixed a1, a2, alpha");
    std::optional<int> sa1, sa2;
    std::optional<double> salpha;
    sweep->add_option("--a1", sa1, "a1 (+-1)")->required();
    sweep->add_option("--a2", sa2, "a2 (+-1)")->required();
    sweep->add_option("--alpha", salpha, "alpha")->required();
    sweep->add_option("--range", range, "lo,hi for b1 and b2");
    sweep->add_option("--steps", steps, "grid points per axis");
    sweep->add_option("--out", out_path, "CSV");

    auto* scenario = app.add_subcommand("scenario", "builtin scenarios");
    scenario->require_subcommand(1);
    auto* list = scenario->add_subcommand("list", "names");
    auto* show = scenario->add_subcommand("show", "config JSON of one scenario");
    std::string show_name;
    show->add_option("name", show_name, "scenario name")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (classify->parsed()) {
            write_text(out_path, classify_report(resolve_params(sys)), out);
        } else if (singular->parsed()) {
            const TwoFoldParams p = resolve_params(sys);
            write_text(out_path, singularity_report(p, folded_singularities(p)), out);
        } else if (slide->parsed()) {
            const Scenario sc = resolve_scenario(sys);
            const auto lohi = parse_list(range, 2, "--range");
            if (steps < 2) {
                throw UsageError("--steps must be at least 2");
            }
            const SlideMap map = slide_map(sc.system, lohi[0], lohi[1], steps);
            write_text(out_path, slide_map_csv(map), out);
            if (!plot_path.empty()) {
                write_text(plot_path, emit_plot(map), out);
            }
            if (!curve_out.empty()) {
                if (!sc.system.normal_form) {
                    throw UsageError("--curve-out needs normal-form constants");
                }
                write_text(curve_out, curve_L_csv(curve_L(*sc.system.normal_form, 101)), out);
            }
        } else if (simulate->parsed()) {
            const Scenario sc = resolve_scenario(sys);
            const double eps = runargs.epsilon.value_or(sc.sim.epsilon);
            const double t_end = runargs.t_end.value_or(sc.sim.t_end);
            Vec3 x0 = sc.sim.x0;
            if (!runargs.x0.empty()) {
                const auto v = parse_list(runargs.x0, 3, "--x0");
                x0 = {v[0], v[1], v[2]};
            }
            Sigmoid sigmoid = sc.sim.sigmoid;
            if (!runargs.sigmoid.empty()) {
                if (runargs.sigmoid != "tanh" && runargs.sigmoid != "sqrt") {
                    throw UsageError("--sigmoid: expected tanh|sqrt");
                }
                sigmoid = parse_sigmoid(runargs.sigmoid);
            }
            const IntegratorOptions opts = options_for(runargs);
            Trajectory traj;
            if (runargs.method == "smoothed") {
                traj = integrate_smoothed(sc.system, sigmoid, eps, x0, 0.0, t_end, opts);
            } else if (runargs.method == "filippov") {
                traj = integrate_filippov(sc.system, x0, 0.0, t_end, opts);
            } else {
                throw UsageError("--method: expected smoothed|filippov");
            }
            PlotStyle style;
            style.title = sc.name;
            finish_run(traj, runargs, style, out);
        } else if (blowup->parsed()) {
            const TwoFoldParams p = resolve_params(sys);
            const double eps = runargs.epsilon.value_or(1e-3);
            const double t_end = runargs.t_end.value_or(10.0);
            Vec3 start{0.0, 1.0, 1.0};
            if (!runargs.x0.empty()) {
                const auto v = parse_list(runargs.x0, 3, "--x0");
                start = {v[0], v[1], v[2]};
            }
            if (start[0] < -1.0 || start[0] > 1.0) {
                throw UsageError("--x0: lambda0 must lie in [-1, 1]");
            }
            const Trajectory traj = integrate_blowup(p, eps, start, 0.0, t_end, options_for(runargs));
            PlotStyle style;
            style.title = "blow-up layer";
            style.vertical_label = "lambda";
            finish_run(traj, runargs, style, out);
        } else if (tcheck->parsed()) {
            const TwoFoldParams p = resolve_params(sys);
            std::vector<TransformCheck> checks;
            for (const auto& s : folded_singularities(p)) {
                checks.push_back(transform_check(p, s));
            }
            if (checks.empty()) {
                throw UsageError("no folded singularities for these constants");
            }
            write_text(out_path, transform_check_report(checks), out);
            const bool pass = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
            if (!pass) {
                err << "transform check failed: slope outside 2 +- 0.1\n";
                return kExitNumerical;
            }
        } else if (sweep->parsed()) {
            if ((*sa1 != 1 && *sa1 != -1) || (*sa2 != 1 && *sa2 != -1)) {
                throw UsageError("--a1 and --a2 must be 1 or -1");
            }
            const auto lohi = parse_list(range, 2, "--range");
            if (steps < 1) {
                throw UsageError("--steps must be positive");
            }
            write_text(out_path, sweep_csv({*sa1, *sa2, 0.0, 0.0, *salpha}, lohi[0], lohi[1], steps), out);
        } else if (list->parsed()) {
            for (const auto& name : builtin_names()) {
                out << name << '\n';
            }
        } else if (show->parsed()) {
            try {
                out << config_json(builtin(show_name));
            } catch (const ContractViolation& e) {
                throw UsageError(e.what());
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SchemaError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ExpressionError& e) {
        err << "expression error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractViolation& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalFailure& e) {
        err << e.what();
        return kExitNumerical;
    } catch (const SingularityError& e) {
        err << "singularity error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

}  // namespace twofold::cli
