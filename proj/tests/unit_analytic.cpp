#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "polysense/analytic.hpp"
#include "test_fixtures.hpp"

using namespace polysense;
using analytic::CaseCondition;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Composite Simpson helper for the omega integral check.
double simpson(const auto& f, double a, double b, int n) {
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}
}  // namespace

TEST_CASE("anglesin branches") {
    CHECK(analytic::anglesin(4.0) == 1.0);
    CHECK(analytic::anglesin(4.89) == doctest::Approx(0.9843).epsilon(1e-3));
    CHECK(analytic::anglesin(1.5 * kPi) == 1.0);  // boundary in the first branch
    CHECK_THROWS_AS(analytic::anglesin(3.0), std::domain_error);
    CHECK_THROWS_AS(analytic::anglesin(6.3), std::domain_error);
}

TEST_CASE("case_of examples") {
    CHECK(analytic::case_of(4.89, 5.385, 1.0) == CaseCondition::c12);
    CHECK(analytic::case_of(5.0, 2.0, 2.5) == CaseCondition::c3);
    CHECK(analytic::case_of(4.0, 2.0, 1.0) == CaseCondition::c12);
    CHECK(analytic::case_of(4.0, 2.0, 2.0) == CaseCondition::c4);  // non-strict for C4
    CHECK(analytic::case_of(2.0, 2.0, 1.0) == CaseCondition::not_concave);
}

TEST_CASE("g1 values and limits") {
    CHECK(analytic::g1(kPi + 1e-7) == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(analytic::g1(1.5 * kPi) == doctest::Approx(-2.0));
    CHECK(analytic::g1(4.89) == doctest::Approx(-2.628).epsilon(1e-3));
    CHECK_THROWS_AS(analytic::g1(3.0), std::domain_error);
}

TEST_CASE("g1 is negative on (pi, 2pi)") {
    for (int i = 0; i < 2000; ++i) {
        double phi = kPi + (i + 0.5) * kPi / 2000.0;
        CHECK(analytic::g1(phi) < 0.0);
    }
}

TEST_CASE("gamma and zeta examples") {
    auto gz = analytic::gamma_zeta(5.0, 2.0, 2.5);
    CHECK(gz.gamma == doctest::Approx(0.7672).epsilon(1e-3));
    CHECK(gz.zeta1 == doctest::Approx(0.9841).epsilon(1e-3));

    // r at the case boundary: gamma = 1 and both zetas collapse.
    double phi = 5.0, l = 2.0;
    double r = l * std::sin(kTwoPi - phi);
    auto at_boundary = analytic::gamma_zeta(phi, l, r);
    CHECK(at_boundary.gamma == doctest::Approx(1.0));
    CHECK(at_boundary.zeta1 == doctest::Approx(phi - 1.5 * kPi));
    CHECK(at_boundary.zeta2 == doctest::Approx(phi - 1.5 * kPi));

    auto gz2 = analytic::gamma_zeta(4.0, 1.0, 10.0);
    CHECK(gz2.gamma == doctest::Approx(0.07568).epsilon(1e-3));
    CHECK(gz2.zeta2 < 0.0);

    CHECK_THROWS_AS(analytic::gamma_zeta(4.89, 5.385, 1.0), std::domain_error);
}

TEST_CASE("omega integral equals 2 l r") {
    double l = 3.2, r = 7.5, xi = 1.234;
    auto integrand = [&](double theta) { return l * r * std::abs(std::sin(xi - theta)); };
    CHECK(simpson(integrand, xi - kPi, xi, 2000) == doctest::Approx(2.0 * l * r).epsilon(1e-9));
}

TEST_CASE("g continuity across case boundaries") {
    const double eps = 1e-7;
    // C12 -> C3 at r = l|sin phi| for phi > 3pi/2.
    for (double phi : {4.8, 5.0, 5.5, 6.0}) {
        double l = 3.0;
        double r = l * std::abs(std::sin(phi));
        double below = analytic::g12(phi, r * (1.0 - eps));
        double above = analytic::g3(phi, l, r * (1.0 + eps));
        CHECK(above == doctest::Approx(below).epsilon(1e-6));
    }
    // C12 -> C4 at r = l for phi <= 3pi/2.
    for (double phi : {3.3, 3.8, 4.2, 4.7}) {
        double l = 3.0;
        double below = analytic::g12(phi, l * (1.0 - eps));
        double above = analytic::g4(phi, l, l * (1.0 + eps));
        CHECK(above == doctest::Approx(below).epsilon(1e-6));
    }
}

TEST_CASE("g3 equals g4 just past r = l") {
    for (double phi : {4.75, 4.89, 5.2, 5.9}) {
        double l = 2.7;
        double r = l + 1e-9;
        REQUIRE(analytic::case_of(phi, l, r) == CaseCondition::c3);
        double a = analytic::g3(phi, l, r);
        double b = analytic::g4(phi, l, r);
        CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
}

TEST_CASE("g3 continuity across its zeta2 sub-branch") {
    for (double phi : {4.8, 5.1, 5.7}) {
        double l = 2.0;
        double eps = 1e-8;
        double lo = analytic::g3(phi, l, l * (1.0 - eps));
        double hi = analytic::g3(phi, l, l * (1.0 + eps));
        CHECK(lo == doctest::Approx(hi).epsilon(1e-6));
    }
}

TEST_CASE("overlap_area zero region and collapsed triangle") {
    double phi = 4.0, l = 2.0, r = 1.0;
    auto c = analytic::case_of(phi, l, r);
    REQUIRE(c == CaseCondition::c12);
    CHECK(analytic::overlap_area(c, phi, l, r, phi - kPi + 0.01) == 0.0);
    CHECK(analytic::overlap_area(c, phi, l, r, 3.0) == 0.0);
    CHECK(analytic::overlap_area(c, phi, l, r, phi - kPi) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(analytic::overlap_area(c, phi, l, r, 0.4) > 0.0);
}

TEST_CASE("measure_Ts examples") {
    auto sq = fixtures::unit_square();
    CHECK(analytic::measure_Ts(sq, 2.0) == doctest::Approx(16.0));

    auto q = fixtures::quadrangle();
    double phi = q.interior_angles()[0];
    double L = q.perimeter();
    CHECK(L == doctest::Approx(38.96).epsilon(1e-3));
    for (double r : {0.5, 1.0, 2.0}) {
        double expected = 2.0 * L * r + 2.0 * r * r * analytic::g1(phi) / 8.0;
        CHECK(analytic::measure_Ts(q, r) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(analytic::measure_Ts(q, 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("measure_Ts stays within [0, 2 L r]") {
    auto q = fixtures::quadrangle();
    for (double r = 0.5; r <= 20.0; r += 0.5) {
        double m = analytic::measure_Ts(q, r);
        CHECK(m >= 0.0);
        CHECK(m <= 2.0 * q.perimeter() * r + 1e-9);
    }
}

TEST_CASE("analytic_cdf for the unit square (Theorem 1)") {
    auto sq = fixtures::unit_square();
    analytic::Arena arena{10.0, 10.0, 3.0};
    // (r L + pi |T|) / (pi |Omega|) with r=2, L=4, |T|=1, |Omega|=100.
    double expected = (2.0 * 4.0 + kPi) / (100.0 * kPi);
    CHECK(analytic::analytic_cdf(sq, arena, 2.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(analytic::analytic_cdf(sq, arena, 0.0) == doctest::Approx(0.01));
}

TEST_CASE("analytic_cdf margin violation") {
    auto sq = geom::Polygon::build({{0, 0}, {20, 0}, {20, 20}, {0, 20}});
    analytic::Arena arena{50.0, 50.0, 20.0};
    CHECK_THROWS_AS(analytic::analytic_cdf(sq, arena, 1.0), std::invalid_argument);
}

TEST_CASE("analytic_cdf nondecreasing in r and bounded by 1") {
    auto q = fixtures::quadrangle();
    auto arena = fixtures::arena_50();
    double prev = 0.0;
    for (double r = 0.0; r <= 20.0; r += 0.25) {
        double p = analytic::analytic_cdf(q, arena, r);
        CHECK(p >= prev - 1e-12);
        CHECK(p <= 1.0);
        prev = p;
    }
}

TEST_CASE("Theorem 2 reduces to Theorem 1 for convex targets") {
    auto tri = geom::Polygon::build({{0, 0}, {6, 0}, {2, 4}});
    auto arena = fixtures::arena_50();
    for (double r = 0.5; r <= 20.0; r += 0.5) {
        double thm1 = (r * tri.perimeter() + kPi * tri.area()) / (kPi * arena.area());
        CHECK(analytic::analytic_cdf(tri, arena, r) == doctest::Approx(thm1).epsilon(1e-13));
    }
}

TEST_CASE("occlusion guard flags the quadrangle, passes a far pair") {
    CHECK(analytic::occlusion_flagged(fixtures::quadrangle(), 20.0));
    CHECK_FALSE(analytic::occlusion_flagged(fixtures::quadrangle(), 1.0));
    CHECK_FALSE(analytic::occlusion_flagged(fixtures::unit_square(), 0.1));
}

TEST_CASE("cdf curve csv round trip") {
    auto q = fixtures::quadrangle();
    auto arena = fixtures::arena_50();
    auto curve = analytic::analytic_curve(q, arena, {1.0, 2.0, 5.0, 10.0});
    CHECK(curve.provenance == analytic::Provenance::analytic_general);
    std::stringstream ss;
    analytic::write_cdf_curve(ss, curve);
    auto back = analytic::read_cdf_curve(ss);
    REQUIRE(back.values.size() == curve.values.size());
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        CHECK(back.values[i] == curve.values[i]);
    CHECK(back.provenance == analytic::Provenance::analytic_general);
}
