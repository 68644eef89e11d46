#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "polysense/geometry.hpp"
#include "polysense/rng.hpp"
#include "test_fixtures.hpp"

using namespace polysense;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("unit square derived fields") {
    auto sq = fixtures::unit_square();
    CHECK(sq.area() == doctest::Approx(1.0));
    CHECK(sq.perimeter() == doctest::Approx(4.0));
    for (double l : sq.edge_lengths()) CHECK(l == doctest::Approx(1.0));
    for (double phi : sq.interior_angles()) CHECK(phi == doctest::Approx(kPi / 2.0));
    CHECK(sq.convex());
}

TEST_CASE("paper quadrangle accepted with one concave angle") {
    auto q = fixtures::quadrangle();
    CHECK(q.edge_lengths()[0] == doctest::Approx(9.434).epsilon(1e-3));
    CHECK(q.edge_lengths()[1] == doctest::Approx(5.385).epsilon(1e-3));
    CHECK(q.edge_lengths()[2] == doctest::Approx(10.0));
    CHECK(q.edge_lengths()[3] == doctest::Approx(10.0 * std::sqrt(2.0)));
    CHECK(q.interior_angles()[0] == doctest::Approx(4.89).epsilon(1e-3));
    CHECK_FALSE(q.convex());
    CHECK(q.concave_angle_indices() == std::vector<std::size_t>{0});
}

TEST_CASE("bowtie rejected as self-intersecting") {
    CHECK_THROWS_AS(geom::Polygon::build({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("degenerate inputs rejected") {
    CHECK_THROWS_AS(geom::Polygon::build({{0, 0}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(geom::Polygon::build({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(geom::Polygon::build({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(geom::Polygon::build({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
}

TEST_CASE("CW input is reoriented to CCW") {
    auto sq = geom::Polygon::build({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(sq.area() == doctest::Approx(1.0));
    double turn_sum = 0.0;
    for (double phi : sq.interior_angles()) turn_sum += kPi - phi;
    CHECK(turn_sum == doctest::Approx(2.0 * kPi).epsilon(1e-9));
}

TEST_CASE("angle sum identity on fixtures") {
    for (const auto& poly : {fixtures::unit_square(), fixtures::quadrangle()}) {
        double turn_sum = 0.0;
        for (double phi : poly.interior_angles()) turn_sum += kPi - phi;
        CHECK(turn_sum == doctest::Approx(2.0 * kPi).epsilon(1e-9));
    }
}

TEST_CASE("angle indexing matches the edge convention") {
    // Right triangle: edge 0 from (0,0) to (1,0), edge 1 up the hypotenuse,
    // edge 2 back down. Angle 0 sits between edges 0 and 1 at vertex 1.
    auto tri = geom::Polygon::build({{0, 0}, {1, 0}, {0, 1}});
    CHECK(tri.interior_angles()[0] == doctest::Approx(kPi / 4.0));
    CHECK(tri.interior_angles()[1] == doctest::Approx(kPi / 4.0));
    CHECK(tri.interior_angles()[2] == doctest::Approx(kPi / 2.0));
    // Quadrangle: the concave angle joins edges 0 and 1, so its adjacent
    // edge lengths are 9.434 and 5.385.
    auto q = fixtures::quadrangle();
    CHECK(q.edge_lengths()[0] == doctest::Approx(std::sqrt(89.0)));
    CHECK(q.edge_lengths()[1] == doctest::Approx(std::sqrt(29.0)));
}

TEST_CASE("build is idempotent") {
    auto q = fixtures::quadrangle();
    auto rebuilt = geom::Polygon::build(q.vertices());
    REQUIRE(rebuilt.size() == q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(rebuilt.vertices()[i].x == q.vertices()[i].x);
        CHECK(rebuilt.vertices()[i].y == q.vertices()[i].y);
    }
}

TEST_CASE("point_in_polygon closed-set convention") {
    auto sq = fixtures::unit_square();
    CHECK(geom::point_in_polygon(sq, {0.5, 0.5}));
    CHECK_FALSE(geom::point_in_polygon(sq, {1.5, 0.5}));
    CHECK(geom::point_in_polygon(sq, {1.0, 0.5}));
    CHECK(geom::point_in_polygon(sq, {1.0, 1.0}));
}

TEST_CASE("ray_cast axis-aligned examples") {
    auto sq = fixtures::unit_square();
    auto hit = geom::ray_cast(sq, {-0.5, 0.5}, 0.0, 20.0);
    CHECK(hit.outcome == geom::Measurement::Outcome::hit);
    CHECK(hit.distance == doctest::Approx(0.5));

    auto inside = geom::ray_cast(sq, {0.5, 0.5}, 0.3, 20.0);
    CHECK(inside.outcome == geom::Measurement::Outcome::inside);

    auto away = geom::ray_cast(sq, {-0.5, 0.5}, kPi, 20.0);
    CHECK(away.outcome == geom::Measurement::Outcome::miss);

    auto out_of_range = geom::ray_cast(sq, {-5.0, 0.5}, 0.0, 2.0);
    CHECK(out_of_range.outcome == geom::Measurement::Outcome::miss);
}

TEST_CASE("ray_cast hit point lies on the boundary and is minimal") {
    auto q = fixtures::quadrangle();
    rng::Stream stream(7);
    int hits = 0;
    while (hits < 200) {
        geom::Point origin{stream.uniform(-15.0, 25.0), stream.uniform(-15.0, 25.0)};
        double theta = stream.uniform(0.0, 2.0 * kPi);
        auto m = geom::ray_cast(q, origin, theta, 40.0);
        if (m.outcome != geom::Measurement::Outcome::hit) continue;
        ++hits;
        geom::Point at{origin.x + m.distance * std::cos(theta),
                       origin.y + m.distance * std::sin(theta)};
        // On the boundary: tiny inward/outward probes straddle the edge.
        bool on_boundary = false;
        const auto& v = q.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) {
            geom::Point a = v[i], b = v[(i + 1) % v.size()];
            double ex = b.x - a.x, ey = b.y - a.y;
            double len = std::hypot(ex, ey);
            double crossv = std::abs(ex * (at.y - a.y) - ey * (at.x - a.x)) / len;
            double t = ((at.x - a.x) * ex + (at.y - a.y) * ey) / (len * len);
            if (crossv < 1e-9 && t >= -1e-12 && t <= 1.0 + 1e-12) on_boundary = true;
        }
        CHECK(on_boundary);
        // No earlier boundary crossing: dense sampling of s in (0, hit).
        for (int k = 1; k < 60; ++k) {
            double s = m.distance * k / 60.0;
            geom::Point p{origin.x + s * std::cos(theta), origin.y + s * std::sin(theta)};
            CHECK_FALSE(geom::point_in_polygon(q, p));
        }
    }
}

TEST_CASE("convex target: hit directions form one contiguous arc") {
    auto sq = fixtures::unit_square();
    geom::Point origin{-2.0, 0.5};
    const int n = 720;
    std::vector<bool> hit(n);
    for (int i = 0; i < n; ++i)
        hit[i] = geom::ray_cast(sq, origin, 2.0 * kPi * i / n, 1e6).outcome ==
                 geom::Measurement::Outcome::hit;
    int transitions = 0;
    for (int i = 0; i < n; ++i) transitions += hit[i] != hit[(i + 1) % n] ? 1 : 0;
    CHECK(transitions == 2);
}

TEST_CASE("ray collinear with an edge returns nearest endpoint") {
    auto sq = fixtures::unit_square();
    auto m = geom::ray_cast(sq, {-0.5, 0.0}, 0.0, 20.0);
    REQUIRE(m.outcome == geom::Measurement::Outcome::hit);
    CHECK(m.distance == doctest::Approx(0.5));
}

TEST_CASE("polygon file round trip with comments") {
    std::stringstream ss;
    ss << "# paper quadrangle\n0,0\n8,5\n# concave vertex above\n10,0\n10,10\n";
    auto q = geom::read_polygon(ss);
    CHECK(q.size() == 4);
    std::stringstream out;
    geom::write_polygon(out, q);
    auto q2 = geom::read_polygon(out);
    CHECK(q2.area() == doctest::Approx(q.area()));
}
