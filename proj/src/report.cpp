#include "twofold/report.hpp"

#include "twofold/errors.hpp"

#include <json.hpp>

namespace twofold {

using nlohmann::json;

namespace {

json params_json(const TwoFoldParams& p) {
    return {{"a1", p.a1}, {"a2", p.a2}, {"b1", p.b1}, {"b2", p.b2}, {"alpha", p.alpha}};
}

json singularity_json(const FoldedSingularity& s) {
    const auto& k = s.constants;
    const auto& c = s.classification;
    json eig = json::array();
    for (const auto& e : c.eigenvalues) {
        eig.push_back({{"re", e.real()}, {"im", e.imag()}});
    }
    return {{"lambda_s", s.lambda_s},
            {"x2s", s.x2s},
            {"x3s", s.x3s},
            {"f2s", k.f2s},
            {"f3s", k.f3s},
            {"c", k.c},
            {"b", k.b},
            {"d1", k.d1},
            {"a_tilde", k.a_tilde},
            {"b_tilde", k.b_tilde},
            {"c_tilde", k.c_tilde},
            {"type", to_string(c.type)},
            {"canard", to_string(c.canard)},
            {"time_reversed", s.time_reversed},
            {"canard_original_time", to_string(s.canard_original_time)},
            {"eigenvalues", eig},
            {"trace", c.trace},
            {"det", c.det}};
}

json singularities_json(const std::vector<FoldedSingularity>& list) {
    json out = json::array();
    for (const auto& s : list) {
        out.push_back(singularity_json(s));
    }
    return out;
}

}  // namespace

std::string classify_report(const TwoFoldParams& p) {
    const TwoFoldFlavor flavor = classify_two_fold(p);
    json doc{{"params", params_json(p)},
             {"flavor", to_string(flavor.tag)},
             {"determinacy_breaking", flavor.determinacy_breaking}};
    try {
        doc["folded_singularities"] = singularities_json(folded_singularities(p));
    } catch (const SingularityError& e) {
        doc["folded_singularities"] = json::array();
        doc["error"] = e.what();
    }
    return doc.dump(2) + "\n";
}

std::string singularity_report(const TwoFoldParams& p, const std::vector<FoldedSingularity>& list) {
    json doc{{"params", params_json(p)}, {"folded_singularities", singularities_json(list)}};
    return doc.dump(2) + "\n";
}

std::string transform_check_report(const std::vector<TransformCheck>& checks) {
    json doc{{"params", params_json(checks.empty() ? TwoFoldParams{} : checks.front().params)}};
    json list = json::array();
    bool all = !checks.empty();
    for (const auto& c : checks) {
        json rows = json::array();
        for (const auto& r : c.residuals) {
            rows.push_back({{"h", r.h}, {"r1", r.rows[0]}, {"r2", r.rows[1]}, {"r3", r.rows[2]}, {"combined", r.combined}});
        }
        list.push_back({{"lambda_s", c.singularity.lambda_s},
                        {"h_values", c.h_values},
                        {"residuals", rows},
                        {"slope", c.slope},
                        {"pass", c.pass}});
        all = all && c.pass;
    }
    doc["checks"] = list;
    doc["pass"] = all;
    return doc.dump(2) + "\n";
}

std::string run_summary(const Trajectory& traj) {
    json counts = json::object();
    for (const auto& e : traj.events) {
        counts[to_string(e.kind)] = counts.value(to_string(e.kind), 0) + 1;
    }
    json doc{{"status", to_string(traj.status)}, {"samples", traj.samples.size()}, {"events", counts}};
    if (!traj.empty()) {
        const auto& s = traj.back();
        doc["t_final"] = s.t;
        doc["x_final"] = {s.state[0], s.state[1], s.state[2]};
    }
    if (traj.seed) {
        doc["seed"] = *traj.seed;
    }
    return doc.dump(2) + "\n";
}

}  // namespace twofold
