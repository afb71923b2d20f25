#include <catch2/catch_amalgamated.hpp>

#include "twofold/errors.hpp"
#include "twofold/scenarios.hpp"
#include "twofold/singularity.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace twofold;
using Catch::Approx;

namespace {

std::string pointer_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const SchemaError& e) {
        return e.pointer();
    }
    return "<no error>";
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("builtin names", "[scenarios]") {
    const auto names = builtin_names();
    CHECK(names == std::vector<std::string>{"example-i", "example-ii", "example-iii", "visible-nf", "invisible-nf",
                                            "mixed-nf"});
    for (const auto& n : names) {
        const Scenario sc = builtin(n);
        CHECK(sc.name == n);
        CHECK_FALSE(sc.provenance.empty());
    }
    CHECK_THROWS_AS(builtin("example-iv"), ContractViolation);
}

TEST_CASE("builtin example fields", "[scenarios]") {
    const Scenario ii = builtin("example-ii");
    const Vec3 v = ii.system.f_plus({0.0, 1.0, 0.0});
    CHECK(v == Vec3{-1.0, 1.0, -7.0 / 5.0});
    CHECK(ii.system.hidden({3.0, 4.0, 5.0}) == Vec3{0.2, 0.0, 0.0});

    const Scenario iii = builtin("example-iii");
    CHECK(iii.system.f_minus({0.0, 0.0, 0.0}) == Vec3{0.0, 0.23, 1.0});
    CHECK(iii.system.f_minus.expression(1).to_string() == "x1 + 23/100");

    const Scenario i = builtin("example-i");
    const Vec3 x{0.5, -1.5, 2.0};
    const Vec3 fp = i.system.f_plus(x);
    CHECK(fp[0] == 1.5);
    CHECK(fp[1] == Approx(2.0 / 5 * 0.5 + 1.0 / 10 * -1.5 - 1));
    CHECK(fp[2] == Approx(3.0 / 10 * -1.5 - 1.0 / 5 * -1.5 * 2.0 - 2.0 / 5));
    const Vec3 fm = i.system.f_minus(x);
    CHECK(fm[0] == 2.0);
    CHECK(fm[1] == Approx(1.0 / 5 * -1.5 * 2.0 - 3.0 / 5));
    CHECK(fm[2] == Approx(2.0 / 5 * 2.0 - 1 - 0.5));
    CHECK(i.sim.epsilon == 1e-3);
    CHECK(i.sim.t_end == 200.0);
    CHECK(i.sim.x0 == Vec3{0.1, 0.5, 0.5});
}

TEST_CASE("normal-form scenarios satisfy their flavor condition", "[scenarios]") {
    const std::pair<const char*, Flavor> cases[] = {
        {"visible-nf", Flavor::Visible}, {"invisible-nf", Flavor::Invisible}, {"mixed-nf", Flavor::Mixed}};
    for (const auto& [name, flavor] : cases) {
        const Scenario sc = builtin(name);
        REQUIRE(sc.system.normal_form.has_value());
        const auto f = classify_two_fold(*sc.system.normal_form);
        CHECK(f.tag == flavor);
        CHECK(f.determinacy_breaking);
        CHECK(sc.system.normal_form->alpha == 0.2);
    }
}

TEST_CASE("params-only config", "[scenarios][config]") {
    const Scenario sc = parse_config(R"({"name":"nf","params":{"a1":1,"a2":1,"b1":-2,"b2":-2,"alpha":0.2}})");
    REQUIRE(sc.system.normal_form.has_value());
    CHECK(*sc.system.normal_form == TwoFoldParams{1, 1, -2.0, -2.0, 0.2});
    CHECK(sc.system.f_minus({0.0, 0.0, 3.0}) == Vec3{3.0, -2.0, 1.0});
    CHECK(sc.sim == SimSettings{});
}

TEST_CASE("schema errors point at the field", "[scenarios][config]") {
    CHECK(pointer_of(R"({"name":"x","f_plus":["0","0","0"]})") == "/f_minus");
    CHECK(pointer_of(R"({"f_plus":["0","0","0"],"f_minus":["0","0","0"]})") == "/name");
    CHECK(pointer_of(R"({"name":"x","f_plus":["0","x9","0"],"f_minus":["0","0","0"]})") == "/f_plus/1");
    CHECK(pointer_of(R"({"name":"x","f_plus":["0","0"],"f_minus":["0","0","0"]})") == "/f_plus");
    CHECK(pointer_of(R"({"name":"x","f_plus":["0","0",1],"f_minus":["0","0","0"]})") == "/f_plus/2");
    CHECK(pointer_of(R"({"name":"x","params":{"a1":2,"a2":1,"b1":0,"b2":0,"alpha":0}})") == "/params/a1");
    CHECK(pointer_of(R"({"name":"x","params":{"a1":1,"a2":1,"b1":0,"b2":0}})") == "/params/alpha");
    CHECK(pointer_of(R"({"name":"x","params":{"a1":1,"a2":1,"b1":0,"b2":0,"alpha":0},"f_plus":["0","0","0"]})") ==
          "/f_plus");
    CHECK(pointer_of(R"({"name":"x","params":{"a1":1,"a2":1,"b1":0,"b2":0,"alpha":0},"sim":{"sigmoid":"erf"}})") ==
          "/sim/sigmoid");
    CHECK(pointer_of(R"({"name":"x","params":{"a1":1,"a2":1,"b1":0,"b2":0,"alpha":0},"sim":{"x0":[0,"a",0]}})") ==
          "/sim/x0/1");
    CHECK(pointer_of(R"({"name":"x","params":{"a1":1,"a2":1,"b1":0,"b2":0,"alpha":0},"extra":1})") == "/extra");
    CHECK(pointer_of("{not json") == "");
    CHECK(pointer_of("[1,2]") == "");
}

TEST_CASE("config round trip", "[scenarios][config]") {
    for (const auto& name : builtin_names()) {
        Scenario sc = builtin(name);
        sc.sim.sigmoid = Sigmoid::AlgebraicSqrt;
        sc.sim.epsilon = 1.0 / 3.0;
        const std::string text = config_json(sc);
        const Scenario back = parse_config(text);
        CHECK(back.name == sc.name);
        CHECK(back.sim == sc.sim);
        CHECK(back.system.normal_form == sc.system.normal_form);
        CHECK(back.system.f_plus.to_strings() == sc.system.f_plus.to_strings());
        CHECK(back.system.f_minus.to_strings() == sc.system.f_minus.to_strings());
        CHECK(back.system.hidden.to_strings() == sc.system.hidden.to_strings());
        CHECK(config_json(back) == text);
    }
}

TEST_CASE("config echo of example-i evaluates like the builtin", "[scenarios][config]") {
    const std::string text = R"({
      "name": "echo",
      "f_plus": ["-x2", "2/5*x1+1/10*x2-1", "3/10*x2-1/5*x2*x3-2/5"],
      "f_minus": ["x3", "1/5*x2*x3-3/5", "2/5*x3-1-x1"],
      "hidden": ["1/5", "0", "0"]
    })";
    const Scenario echo = parse_config(text);
    const Scenario ref = builtin("example-i");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        const double l = u(rng) / 5.0;
        const Vec3 a = eval_combination(echo.system, x, l);
        const Vec3 b = eval_combination(ref.system, x, l);
        CHECK(max_norm(a - b) <= 1e-14);
    }
}

TEST_CASE("files", "[scenarios][io]") {
    const auto dir = std::filesystem::temp_directory_path() / "twofold_scenarios_test";
    std::filesystem::create_directories(dir);
    const Scenario sc = builtin("invisible-nf");
    save_config(sc, dir / "nf.json");
    const Scenario back = load_config(dir / "nf.json");
    CHECK(back.system.normal_form == sc.system.normal_form);
    CHECK_THROWS(load_config(dir / "missing.json"));

    const auto traj = integrate_filippov(sc.system, {0.1, 1.0, -1.0}, 0.0, 0.5);
    save_run(traj, dir / "run.csv", dir / "run_events.csv");
    CHECK(read_file(dir / "run.csv") == trajectory_csv(traj));
    CHECK(read_file(dir / "run_events.csv") == events_csv(traj));
    std::filesystem::remove_all(dir);
}
