#include <catch2/catch_amalgamated.hpp>

#include "twofold/cli.hpp"
#include "twofold/errors.hpp"
#include "twofold/report.hpp"
#include "twofold/scenarios.hpp"
#include "twofold/svg.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace twofold;
using Catch::Approx;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "twofold_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("classify report", "[cli]") {
    const auto r = run_cli({"classify", "--a1", "1", "--a2", "1", "--b1", "-2", "--b2", "-2", "--alpha", "0.2"});
    REQUIRE(r.code == cli::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["flavor"] == "Invisible");
    CHECK(doc["determinacy_breaking"] == true);
    REQUIRE(doc["folded_singularities"].size() == 1);
    CHECK(doc["folded_singularities"][0]["lambda_s"].get<double>() == 0.0);
    CHECK(doc["folded_singularities"][0]["type"] == "FoldedNode");
    for (const char* key : {"x2s", "x3s", "f2s", "f3s", "c", "b", "d1", "a_tilde", "b_tilde", "c_tilde", "canard",
                            "eigenvalues", "trace", "det"}) {
        CHECK(doc["folded_singularities"][0].contains(key));
    }

    // alpha = 0 is reported, not fatal, in classify
    const auto flat = run_cli({"classify", "--a1", "1", "--a2", "1", "--b1", "-2", "--b2", "-2", "--alpha", "0"});
    CHECK(flat.code == cli::kExitOk);
    CHECK(json::parse(flat.out).contains("error"));
}

TEST_CASE("transform-check command", "[cli]") {
    const auto r =
        run_cli({"transform-check", "--a1", "1", "--a2", "1", "--b1", "1", "--b2", "-1", "--alpha", "0.2"});
    REQUIRE(r.code == cli::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["pass"] == true);
    CHECK(doc["checks"][0]["slope"].get<double>() == Approx(2.0).margin(0.1));
}

TEST_CASE("simulate example-ii", "[cli]") {
    const auto dir = scratch();
    const auto csv = (dir / "traj.csv").string();
    const auto r = run_cli({"simulate", "--scenario", "example-ii", "--epsilon", "1e-3", "--t-end", "200", "--out", csv});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x1,x2,x3,mode,lambda");
    int changes = 0;
    double prev = 0.0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double x1 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        if (prev != 0.0 && x1 != 0.0 && (prev < 0.0) != (x1 < 0.0)) {
            ++changes;
        }
        if (x1 != 0.0) {
            prev = x1;
        }
    }
    CHECK(changes > 10);
    CHECK(json::parse(r.out)["status"] == "Completed");
}

TEST_CASE("identical invocations give identical artifacts", "[cli]") {
    const auto dir = scratch();
    std::string first_csv, first_svg, first_out;
    for (int k = 0; k < 2; ++k) {
        const auto r = run_cli({"simulate", "--scenario", "invisible-nf", "--method", "filippov", "--x0", "0,-1,-1",
                                "--eject-at", "0.5", "--seed", "99", "--out", (dir / "d.csv").string(), "--plot",
                                (dir / "d.svg").string()});
        REQUIRE(r.code == cli::kExitOk);
        CHECK(json::parse(r.out)["seed"] == 99);
        if (k == 0) {
            first_csv = read_file(dir / "d.csv");
            first_svg = read_file(dir / "d.svg");
            first_out = r.out;
        } else {
            CHECK(read_file(dir / "d.csv") == first_csv);
            CHECK(read_file(dir / "d.svg") == first_svg);
            CHECK(r.out == first_out);
        }
    }
}

TEST_CASE("other commands", "[cli]") {
    const auto dir = scratch();
    auto r = run_cli({"scenario", "list"});
    CHECK(r.code == 0);
    CHECK(r.out.find("example-iii\n") != std::string::npos);

    r = run_cli({"scenario", "show", "example-ii"});
    CHECK(r.code == 0);
    CHECK(parse_config(r.out).name == "example-ii");

    r = run_cli({"sweep", "--a1", "-1", "--a2", "1", "--alpha", "0.2", "--range", "-4,4", "--steps", "9"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 82);
    CHECK(r.out.find("-4,-1,Mixed,true,2,FoldedNode;FoldedSaddle") != std::string::npos);

    r = run_cli({"slide-map", "--scenario", "invisible-nf", "--steps", "5", "--curve-out",
                 (dir / "L.csv").string(), "--plot", (dir / "map.svg").string()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("x2,x3,region,lambdas\n", 0) == 0);
    CHECK(read_file(dir / "L.csv").rfind("lambda,x2,x3,tx_lambda,tx_x2,tx_x3", 0) == 0);
    CHECK(read_file(dir / "map.svg").find("<svg") == 0);

    r = run_cli({"blowup", "--scenario", "invisible-nf", "--x0", "0,1,1", "--t-end", "0.1"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["status"] == "Completed");

    r = run_cli({"singularity", "--scenario", "mixed-nf"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["folded_singularities"].size() == 2);

    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"name":"c","params":{"a1":-1,"a2":-1,"b1":-1,"b2":0.5,"alpha":0.2}})";
    r = run_cli({"classify", "--config", cfg.string()});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["flavor"] == "Visible");
}

TEST_CASE("usage errors exit 2", "[cli]") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run_cli({"classify", "--a1", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({"classify", "--a1", "1", "--a2", "1", "--b1", "0", "--b2", "0", "--alpha", "0", "--bogus"}).code ==
          cli::kExitUsage);
    CHECK(run_cli({"classify", "--a1", "3", "--a2", "1", "--b1", "0", "--b2", "0", "--alpha", "0"}).code ==
          cli::kExitUsage);
    CHECK(run_cli({"classify", "--scenario", "invisible-nf", "--a1", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({"simulate", "--scenario", "nope"}).code == cli::kExitUsage);
    CHECK(run_cli({"simulate", "--scenario", "example-ii", "--x0", "1,2"}).code == cli::kExitUsage);
    CHECK(run_cli({"simulate", "--scenario", "example-ii", "--sigmoid", "erf"}).code == cli::kExitUsage);
    CHECK(run_cli({"simulate", "--scenario", "example-ii", "--policy", "bounce"}).code == cli::kExitUsage);
    CHECK(run_cli({"classify", "--scenario", "example-ii"}).code == cli::kExitUsage);  // not a normal form
    const auto r = run_cli({"classify", "--a1", "x"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("--a1") != std::string::npos);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("numerical failures exit 3", "[cli]") {
    const auto r = run_cli({"singularity", "--a1", "1", "--a2", "1", "--b1", "-2", "--b2", "-2", "--alpha", "0"});
    CHECK(r.code == cli::kExitNumerical);
    // a stiff run with a floor above the layer's step size
    const auto dir = scratch();
    const auto cfg = dir / "stiff.json";
    std::ofstream(cfg) << R"({"name":"s","f_plus":["x1^2","0","0"],"f_minus":["x1^2","0","0"],
                              "sim":{"x0":[1,0,0],"t_end":2}})";
    const auto s = run_cli({"simulate", "--config", cfg.string()});
    CHECK(s.code == cli::kExitNumerical);
    CHECK(s.err.find("StepFloor") != std::string::npos);

    const auto budget = run_cli({"simulate", "--scenario", "example-ii", "--max-steps", "100"});
    CHECK(budget.code == cli::kExitNumerical);
    CHECK(run_cli({"simulate", "--scenario", "example-ii", "--max-steps", "0"}).code == cli::kExitUsage);
}

TEST_CASE("svg output", "[svg]") {
    Trajectory empty;
    CHECK_THROWS_AS(emit_plot(empty), ContractViolation);

    Trajectory one;
    one.samples.push_back(Sample{});
    const std::string svg = emit_plot(one);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<polyline") == std::string::npos);

    const Scenario sc = builtin("example-i");
    const auto traj = integrate_smoothed(sc.system, Sigmoid::Tanh, 1e-3, sc.sim.x0, 0.0, 20.0);
    PlotStyle style;
    double lo_u = 1e9, hi_u = -1e9, lo_v = 1e9, hi_v = -1e9;
    for (const auto& s : traj.samples) {
        const Vec2 p = project(style, s.state);
        lo_u = std::min(lo_u, p[0]);
        hi_u = std::max(hi_u, p[0]);
        lo_v = std::min(lo_v, p[1]);
        hi_v = std::max(hi_v, p[1]);
    }
    CHECK(lo_u < 0.0);
    CHECK(hi_u > 0.0);
    CHECK(lo_v < 0.0);
    CHECK(hi_v > 0.0);
    CHECK(emit_plot(traj, style) == emit_plot(traj, style));

    // default projection: horizontal x2 + x3, vertical x1
    const Vec2 p = project(style, {0.5, 1.0, 2.0});
    CHECK(p[0] == Approx(3.0 / std::sqrt(2.0)));
    CHECK(p[1] == Approx(0.5));
}

TEST_CASE("run summary", "[report]") {
    const auto sys = normal_form_system({1, 1, -2.0, -2.0, 0.0});
    const auto traj = integrate_filippov(sys, {0.0, 1.0, 1.0}, 0.0, 5.0);
    const json doc = json::parse(run_summary(traj));
    CHECK(doc["status"] == "DeterminacyBreak");
    CHECK(doc["events"]["TwoFoldHit"] == 1);
    CHECK_FALSE(doc.contains("seed"));
}
