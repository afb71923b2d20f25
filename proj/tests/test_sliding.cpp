#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include "twofold/errors.hpp"
#include "twofold/sliding.hpp"

#include <random>

using namespace twofold;
using Catch::Approx;

TEST_CASE("sliding lambda without hidden term", "[sliding]") {
    const auto sys = normal_form_system({1, 1, -2.0, -2.0, 0.0});
    CHECK(sliding_lambda(sys, 1.0, -1.0).empty());
    CHECK(sliding_lambda(sys, -1.0, 1.0).empty());

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double s = i % 2 ? 1.0 : -1.0;  // both x2, x3 of one sign
        const double x2 = s * u(rng);
        const double x3 = s * u(rng);
        const auto roots = sliding_lambda(sys, x2, x3);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0].lambda == Approx((x3 - x2) / (x3 + x2)).margin(1e-12));
        CHECK(roots[0].stability == (s > 0 ? Stability::Attracting : Stability::Repelling));
    }
}

TEST_CASE("sliding lambda with hidden term matches a scan", "[sliding]") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const double alpha : {-0.6, -0.2, 0.2, 0.6}) {
        const TwoFoldParams p{1, -1, 0.3, -0.7, alpha};
        const auto sys = normal_form_system(p);
        // the same system written out, so the generic scan path is used
        PiecewiseSmoothSystem generic = sys;
        generic.normal_form.reset();
        for (int i = 0; i < 200; ++i) {
            const double x2 = u(rng);
            const double x3 = u(rng);
            const auto closed = sliding_lambda(sys, x2, x3);
            const auto scanned = sliding_lambda(generic, x2, x3);
            const auto reference = oracle::scan_sliding_lambdas(sys, x2, x3);
            std::size_t simple = 0;
            for (const auto& r : closed) {
                CHECK(std::abs(eval_combination(sys, {0.0, x2, x3}, r.lambda)[0]) <= kResidualTol);
                CHECK(r.lambda >= -1.0);
                CHECK(r.lambda <= 1.0);
                simple += r.double_root ? 0 : 1;
                const double slope = oracle::d1_dlambda(p, r.lambda, x2, x3);
                if (!r.double_root && std::abs(slope) > 1e-9) {
                    CHECK(r.stability == (slope < 0 ? Stability::Attracting : Stability::Repelling));
                }
            }
            CHECK(simple == reference.size());
            REQUIRE(scanned.size() == closed.size());
            for (std::size_t k = 0; k < closed.size(); ++k) {
                CHECK(scanned[k].lambda == Approx(closed[k].lambda).margin(1e-9));
            }
        }
    }
}

TEST_CASE("region classification of the normal form", "[sliding]") {
    const auto sys = normal_form_system({1, 1, -2.0, -2.0, 0.0});
    CHECK(region_classify(sys, 1.0, 1.0) == RegionClass::AttractingSliding);
    CHECK(region_classify(sys, -1.0, -1.0) == RegionClass::RepellingSliding);
    CHECK(region_classify(sys, 1.0, -1.0) == RegionClass::Crossing);
    CHECK(region_classify(sys, -1.0, 1.0) == RegionClass::Crossing);
    CHECK(region_classify(sys, 0.0, 1.0) == RegionClass::Tangency);
    CHECK(region_classify(sys, 1.0, 0.0) == RegionClass::Tangency);
    CHECK(to_string(RegionClass::AttractingSliding) == "AttractingSliding");
}

TEST_CASE("sliding vector", "[sliding]") {
    const auto sys = normal_form_system({1, 1, -2.0, -2.0, 0.0});
    const Vec2 v = sliding_vector(sys, 1.0, 1.0, 0.0);
    CHECK(v[0] == Approx(-0.5));
    CHECK(v[1] == Approx(-0.5));
    CHECK_THROWS_AS(sliding_vector(sys, 1.0, 1.0, 0.5), ContractViolation);
}

TEST_CASE("curve L lies on the fold of the sliding manifold", "[sliding][curve]") {
    const TwoFoldParams p{-1, 1, -4.0, -1.0, 0.35};
    const CurveL curve = curve_L(p, 41);
    REQUIRE(curve.points.size() == 41);
    CHECK(curve.points.front().lambda == -1.0);
    CHECK(curve.points.back().lambda == 1.0);
    for (const auto& pt : curve.points) {
        CHECK(std::abs(oracle::field(p, pt.lambda, pt.x2, pt.x3).f1) <= 1e-14);
        CHECK(std::abs(oracle::d1_dlambda(p, pt.lambda, pt.x2, pt.x3)) <= 1e-14);
        // tangent against a finite difference of the parameterization
        const double h = 1e-6;
        double a2, a3, b2, b3;
        oracle::fold_point(p, pt.lambda + h, a2, a3);
        oracle::fold_point(p, pt.lambda - h, b2, b3);
        CHECK(pt.tangent[0] == 1.0);
        CHECK(pt.tangent[1] == Approx((a2 - b2) / (2 * h)).margin(1e-8));
        CHECK(pt.tangent[2] == Approx((a3 - b3) / (2 * h)).margin(1e-8));
    }
    const std::string csv = curve_L_csv(curve);
    CHECK(csv.rfind("lambda,x2,x3,tx_lambda,tx_x2,tx_x3\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);
    CHECK_THROWS_AS(curve_L(p, 1), ContractViolation);
}

TEST_CASE("degeneracy report", "[sliding][degeneracy]") {
    const auto flat = degeneracy_report({1, 1, -2.0, -2.0, 0.0});
    CHECK(flat.is_degenerate);
    CHECK(flat.max_abs_second_derivative == 0.0);

    const auto bent = degeneracy_report({1, 1, -2.0, -2.0, 0.2}, 11);
    CHECK_FALSE(bent.is_degenerate);
    REQUIRE(bent.second_derivative.size() == 11);
    for (const double d : bent.second_derivative) {
        CHECK(d == Approx(-0.4).margin(1e-12));
    }

    // alpha = 0: f1 vanishes at the origin for every lambda
    const auto sys = normal_form_system({-1, 1, 3.0, -1.0, 0.0});
    for (int i = 0; i <= 100; ++i) {
        CHECK(eval_combination(sys, {0, 0, 0}, -1.0 + 0.02 * i)[0] == 0.0);
    }
}

TEST_CASE("slide map", "[sliding]") {
    const auto sys = normal_form_system({1, 1, -2.0, -2.0, 0.0});
    const SlideMap map = slide_map(sys, -1.0, 1.0, 5);
    REQUIRE(map.regions.size() == 25);
    CHECK(map.regions[0] == RegionClass::RepellingSliding);   // (-1, -1)
    CHECK(map.regions[24] == RegionClass::AttractingSliding);  // (1, 1)
    CHECK(map.regions[4] == RegionClass::Crossing);            // (1, -1)
    CHECK(map.regions[12] == RegionClass::Tangency);           // (0, 0)
    const std::string csv = slide_map_csv(map);
    CHECK(csv.rfind("x2,x3,region,lambdas\n", 0) == 0);
    CHECK_THROWS_AS(slide_map(sys, 1.0, -1.0, 5), ContractViolation);
}
