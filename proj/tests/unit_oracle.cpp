#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polysense/oracle.hpp"
#include "test_fixtures.hpp"

using namespace polysense;
using analytic::CaseCondition;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("quadrature matches g12 under C12") {
    for (double phi : {3.4, 4.0, 4.7, 4.89, 5.3, 6.0}) {
        for (double l : {1.0, 2.5}) {
            double r = 0.8 * l * analytic::anglesin(phi);
            REQUIRE(analytic::case_of(phi, l, r) == CaseCondition::c12);
            CHECK(oracle::quad_overlap(CaseCondition::c12, phi, l, r) ==
                  doctest::Approx(analytic::g12(phi, r)).epsilon(1e-8));
        }
    }
}

TEST_CASE("quadrature matches g3 in both zeta2 sub-branches") {
    // zeta2 > 0: l|sin phi| <= r < l; zeta2 <= 0: r >= l.
    for (double phi : {4.8, 4.89, 5.4, 5.9}) {
        double l = 3.0;
        for (double frac : {0.3, 0.8}) {
            double r = l * analytic::anglesin(phi) +
                       frac * l * (1.0 - analytic::anglesin(phi));
            if (analytic::case_of(phi, l, r) != CaseCondition::c3) continue;
            CHECK(oracle::quad_overlap(CaseCondition::c3, phi, l, r) ==
                  doctest::Approx(analytic::g3(phi, l, r)).epsilon(1e-7));
        }
        for (double r : {1.2 * l, 3.0 * l}) {
            REQUIRE(analytic::case_of(phi, l, r) == CaseCondition::c3);
            CHECK(oracle::quad_overlap(CaseCondition::c3, phi, l, r) ==
                  doctest::Approx(analytic::g3(phi, l, r)).epsilon(1e-7));
        }
    }
}

TEST_CASE("quadrature matches g4 under C4") {
    for (double phi : {3.3, 3.9, 4.4, 4.7}) {
        for (double l : {0.7, 2.0}) {
            for (double r : {1.01 * l, 2.0 * l, 6.0 * l}) {
                REQUIRE(analytic::case_of(phi, l, r) == CaseCondition::c4);
                CHECK(oracle::quad_overlap(CaseCondition::c4, phi, l, r) ==
                      doctest::Approx(analytic::g4(phi, l, r)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("paper-quadrangle instance matches quadrature") {
    double phi = fixtures::quadrangle_phi();
    REQUIRE(analytic::case_of(phi, 5.385, 8.0) == CaseCondition::c3);
    CHECK(oracle::quad_overlap(CaseCondition::c3, phi, 5.385, 8.0) ==
          doctest::Approx(analytic::g3(phi, 5.385, 8.0)).epsilon(1e-7));
}

TEST_CASE("direct Monte Carlo overlap agrees with the g functions") {
    const long long n = 2'000'000;
    struct Case {
        double phi, l, r;
    };
    for (const Case& c : {Case{4.0, 2.0, 1.0}, Case{4.89, 5.385, 8.0}, Case{4.3, 1.5, 4.0}}) {
        auto cond = analytic::case_of(c.phi, c.l, c.r);
        double expected = 0.0;
        switch (cond) {
            case CaseCondition::c12: expected = analytic::g12(c.phi, c.r); break;
            case CaseCondition::c3: expected = analytic::g3(c.phi, c.l, c.r); break;
            case CaseCondition::c4: expected = analytic::g4(c.phi, c.l, c.r); break;
            default: FAIL("unexpected case");
        }
        auto mc = oracle::mc_measure_direct(c.phi, c.l, c.r, n, 99);
        CHECK(std::abs(mc.estimate - expected) <= 3.5 * mc.standard_error);
    }
}

TEST_CASE("mc_cdf brackets the analytic value for the unit square") {
    auto sq = fixtures::unit_square();
    analytic::Arena arena{10.0, 10.0, 3.0};
    auto placed = geom::Polygon::build(sq.vertices());
    auto placed_sq = placed.translated(4.5, 4.5);
    auto res = oracle::mc_cdf(placed_sq, arena, {0.0, 2.0}, 200000, 4242);
    double p0 = analytic::analytic_cdf(sq, arena, 0.0);
    double p2 = analytic::analytic_cdf(sq, arena, 2.0);
    CHECK(std::abs(res.estimates[0] - p0) <= 3.0 * std::max(res.standard_errors[0], 1e-6));
    CHECK(std::abs(res.estimates[1] - p2) <= 3.0 * res.standard_errors[1]);
    // Common random numbers: the estimate is monotone by construction.
    CHECK(res.estimates[1] >= res.estimates[0]);
}

TEST_CASE("mc_cdf is independent of the thread count") {
    auto sq = fixtures::unit_square();
    analytic::Arena arena{10.0, 10.0, 3.0};
    auto placed_sq = sq.translated(4.5, 4.5);
    auto a = oracle::mc_cdf(placed_sq, arena, {0.5, 1.0, 2.0}, 50000, 7, 1);
    auto b = oracle::mc_cdf(placed_sq, arena, {0.5, 1.0, 2.0}, 50000, 7, 8);
    for (std::size_t i = 0; i < a.estimates.size(); ++i)
        CHECK(a.estimates[i] == b.estimates[i]);
}
