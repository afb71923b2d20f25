#include "twofold/scenarios.hpp"

#include "twofold/errors.hpp"
#include "twofold/singularity.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace twofold {

using nlohmann::json;

namespace {

struct ExampleText {
    const char* name;
    std::array<const char*, 3> plus;
    std::array<const char*, 3> minus;
    const char* note;
};

const ExampleText kExamples[] = {
    {"example-i",
     {"-x2", "2/5*x1+1/10*x2-1", "3/10*x2-1/5*x2*x3-2/5"},
     {"x3", "1/5*x2*x3-3/5", "2/5*x3-1-x1"},
     "attractor example (i), hidden term (1/5,0,0); x0 and window are our choice"},
    {"example-ii",
     {"-x2", "1+x1", "-7/5"},
     {"x3", "-9/10", "1-3/5*x1"},
     "attractor example (ii), hidden term (1/5,0,0); x0 and window are our choice"},
    {"example-iii",
     {"-x2+1/10*x1", "x1-6/5", "x1-2"},
     {"x3+1/10*x1", "x1+23/100", "1-x1"},
     "attractor example (iii), hidden term (1/5,0,0); x0 and window are our choice"},
};

struct NormalFormDefault {
    const char* name;
    TwoFoldParams params;
    Flavor flavor;
    Vec3 x0;
    const char* note;
};

const NormalFormDefault kNormalForms[] = {
    {"visible-nf", {-1, -1, -1.0, 0.5, 0.2}, Flavor::Visible, {0.1, 1.0, -1.0},
     "visible two-fold, determinacy-breaking (b1 < 0); constants chosen here"},
    {"invisible-nf", {1, 1, -2.0, -2.0, 0.2}, Flavor::Invisible, {0.0, 1.0, 1.0},
     "invisible two-fold, b1,b2 < 0 and b1 b2 > 1; constants chosen here"},
    {"mixed-nf", {-1, 1, -4.0, -1.0, 0.2}, Flavor::Mixed, {0.0, 1.0, 1.0},
     "mixed two-fold with b1+b2 < 0, b1-b2 < -2 (one folded node, one folded saddle); constants chosen here"},
};

SmoothField hidden_alpha_field() { return parse_field("1/5", "0", "0"); }

[[noreturn]] void schema(const std::string& pointer, const std::string& message) { throw SchemaError(pointer, message); }

double number_at(const json& obj, const std::string& key, const std::string& pointer) {
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        schema(pointer + "/" + key, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        schema(pointer + "/" + key, "expected a finite number");
    }
    return d;
}

SmoothField field_at(const json& doc, const std::string& key) {
    const std::string pointer = "/" + key;
    const auto& v = doc.at(key);
    if (!v.is_array() || v.size() != 3) {
        schema(pointer, "expected an array of three expressions");
    }
    std::array<std::string, 3> text;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!v[i].is_string()) {
            schema(pointer + "/" + std::to_string(i), "expected an expression string");
        }
        text[i] = v[i].get<std::string>();
    }
    try {
        return parse_field(text[0], text[1], text[2]);
    } catch (const ExpressionError& e) {
        // Point at the component that failed to parse.
        for (std::size_t i = 0; i < 3; ++i) {
            try {
                (void)parse_field(text[i], "0", "0");
            } catch (const ExpressionError&) {
                schema(pointer + "/" + std::to_string(i), e.what());
            }
        }
        schema(pointer, e.what());
    }
}

int sign_at(const json& obj, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1)) {
        schema("/params/" + key, "expected 1 or -1");
    }
    return v.get<int>();
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& pointer) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) {
            ok = ok || it.key() == a;
        }
        if (!ok) {
            schema(pointer + "/" + it.key(), "unknown key");
        }
    }
}

SimSettings sim_at(const json& doc) {
    SimSettings sim;
    if (!doc.contains("sim")) {
        return sim;
    }
    const auto& s = doc.at("sim");
    if (!s.is_object()) {
        schema("/sim", "expected an object");
    }
    only_keys(s, {"epsilon", "t_end", "x0", "sigmoid"}, "/sim");
    if (s.contains("epsilon")) {
        sim.epsilon = number_at(s, "epsilon", "/sim");
        if (!(sim.epsilon > 0.0)) {
            schema("/sim/epsilon", "must be positive");
        }
    }
    if (s.contains("t_end")) {
        sim.t_end = number_at(s, "t_end", "/sim");
    }
    if (s.contains("x0")) {
        const auto& x0 = s.at("x0");
        if (!x0.is_array() || x0.size() != 3) {
            schema("/sim/x0", "expected three numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            if (!x0[i].is_number()) {
                schema("/sim/x0/" + std::to_string(i), "expected a number");
            }
            sim.x0[i] = x0[i].get<double>();
        }
    }
    if (s.contains("sigmoid")) {
        const auto& v = s.at("sigmoid");
        if (!v.is_string() || (v != "tanh" && v != "sqrt")) {
            schema("/sim/sigmoid", "expected \"tanh\" or \"sqrt\"");
        }
        sim.sigmoid = parse_sigmoid(v.get<std::string>());
    }
    return sim;
}

json field_json(const SmoothField& f) {
    const auto text = f.to_strings();
    return json::array({text[0], text[1], text[2]});
}

}  // namespace

std::vector<std::string> builtin_names() {
    std::vector<std::string> names;
    for (const auto& e : kExamples) {
        names.emplace_back(e.name);
    }
    for (const auto& n : kNormalForms) {
        names.emplace_back(n.name);
    }
    return names;
}

Scenario builtin(const std::string& name) {
    for (const auto& e : kExamples) {
        if (name == e.name) {
            Scenario sc;
            sc.name = name;
            sc.system.f_plus = parse_field(e.plus[0], e.plus[1], e.plus[2]);
            sc.system.f_minus = parse_field(e.minus[0], e.minus[1], e.minus[2]);
            sc.system.hidden = hidden_alpha_field();
            sc.provenance = e.note;
            return sc;
        }
    }
    for (const auto& n : kNormalForms) {
        if (name == n.name) {
            const TwoFoldFlavor flavor = classify_two_fold(n.params);
            if (flavor.tag != n.flavor || !flavor.determinacy_breaking) {
                throw ContractViolation("builtin " + name + " is not determinacy-breaking for its flavor");
            }
            Scenario sc;
            sc.name = name;
            sc.system = normal_form_system(n.params);
            sc.sim.t_end = 10.0;
            sc.sim.x0 = n.x0;
            sc.provenance = n.note;
            return sc;
        }
    }
    throw ContractViolation("unknown scenario '" + name + "'");
}

Scenario parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        schema("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        schema("", "expected an object");
    }
    only_keys(doc, {"name", "f_plus", "f_minus", "hidden", "params", "sim"}, "");
    if (!doc.contains("name") || !doc.at("name").is_string()) {
        schema("/name", "expected a string");
    }
    Scenario sc;
    sc.name = doc.at("name").get<std::string>();
    if (doc.contains("params")) {
        for (const char* key : {"f_plus", "f_minus", "hidden"}) {
            if (doc.contains(key)) {
                schema(std::string("/") + key, "give either params or field expressions, not both");
            }
        }
        const auto& p = doc.at("params");
        if (!p.is_object()) {
            schema("/params", "expected an object");
        }
        only_keys(p, {"a1", "a2", "b1", "b2", "alpha"}, "/params");
        for (const char* key : {"a1", "a2", "b1", "b2", "alpha"}) {
            if (!p.contains(key)) {
                schema(std::string("/params/") + key, "missing");
            }
        }
        TwoFoldParams params;
        params.a1 = sign_at(p, "a1");
        params.a2 = sign_at(p, "a2");
        params.b1 = number_at(p, "b1", "/params");
        params.b2 = number_at(p, "b2", "/params");
        params.alpha = number_at(p, "alpha", "/params");
        sc.system = normal_form_system(params);
    } else {
        for (const char* key : {"f_plus", "f_minus"}) {
            if (!doc.contains(key)) {
                schema(std::string("/") + key, "missing (and no params given)");
            }
        }
        sc.system.f_plus = field_at(doc, "f_plus");
        sc.system.f_minus = field_at(doc, "f_minus");
        sc.system.hidden = doc.contains("hidden") ? field_at(doc, "hidden") : parse_field("0", "0", "0");
    }
    sc.sim = sim_at(doc);
    sc.provenance = "loaded from config";
    return sc;
}

Scenario load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_json(const Scenario& scenario) {
    json doc;
    doc["name"] = scenario.name;
    if (scenario.system.normal_form) {
        const auto& p = *scenario.system.normal_form;
        doc["params"] = {{"a1", p.a1}, {"a2", p.a2}, {"b1", p.b1}, {"b2", p.b2}, {"alpha", p.alpha}};
    } else {
        doc["f_plus"] = field_json(scenario.system.f_plus);
        doc["f_minus"] = field_json(scenario.system.f_minus);
        doc["hidden"] = field_json(scenario.system.hidden);
    }
    const auto& s = scenario.sim;
    doc["sim"] = {{"epsilon", s.epsilon},
                  {"t_end", s.t_end},
                  {"x0", {s.x0[0], s.x0[1], s.x0[2]}},
                  {"sigmoid", to_string(s.sigmoid)}};
    return doc.dump(2) + "\n";
}

void save_config(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << config_json(scenario);
}

void save_run(const Trajectory& traj, const std::filesystem::path& trajectory_path,
              const std::filesystem::path& events_path) {
    std::ofstream out(trajectory_path);
    if (!out) {
        throw std::runtime_error("cannot write " + trajectory_path.string());
    }
    out << trajectory_csv(traj);
    if (!events_path.empty()) {
        std::ofstream ev(events_path);
        if (!ev) {
            throw std::runtime_error("cannot write " + events_path.string());
        }
        ev << events_csv(traj);
    }
}

}  // namespace twofold
