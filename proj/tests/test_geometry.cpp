#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "pnp/geometry.hpp"

using namespace pnp::geo;

namespace {

HexFrame frame_of(Point origin, double theta, double side) {
    HexFrame f;
    f.origin = origin;
    f.theta = normalize_theta(theta);
    f.side = side;
    return f;
}

// brute-force nearest lattice center, the Voronoi oracle for tile ownership
Axial argmin_center(const HexFrame& f, Point p, int reach) {
    Axial best{0, 0};
    double best_d = std::numeric_limits<double>::infinity();
    for (int q = -reach; q <= reach; ++q)
        for (int r = -reach; r <= reach; ++r) {
            const Axial a{q, r};
            const double d = distance(p, axial_center(f, a));
            if (d < best_d - 1e-12) {
                best = a;
                best_d = d;
            } else if (d < best_d + 1e-12 && a < best) {
                best = a;
            }
        }
    return best;
}

}  // namespace

TEST_CASE("normalize_theta lands in [0, pi/3) and respects hex symmetry") {
    const double sixth = M_PI / 3.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng);
        const double n = normalize_theta(t);
        CHECK(n >= 0.0);
        CHECK(n < sixth);
        CHECK(normalize_theta(t + sixth) == doctest::Approx(n).epsilon(1e-12));
    }
    CHECK(normalize_theta(0.0) == 0.0);
}

TEST_CASE("owning_axial equals the brute-force nearest-center oracle") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coord(-40.0, 40.0);
    std::uniform_real_distribution<double> ang(0.0, 10.0);
    for (int trial = 0; trial < 5; ++trial) {
        const HexFrame f = frame_of({coord(rng) / 10, coord(rng) / 10}, ang(rng), 5.0);
        for (int i = 0; i < 1000; ++i) {
            const Point p{coord(rng), coord(rng)};
            const Axial got = owning_axial(f, p);
            const Axial want = argmin_center(f, p, 12);
            CHECK(got == want);
        }
    }
}

TEST_CASE("hexagons partition the plane: every point belongs to exactly one tile") {
    const HexFrame f = frame_of({1.25, -0.5}, 0.3, 5.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> coord(-25.0, 25.0);
    for (int i = 0; i < 500; ++i) {
        const Point p{coord(rng), coord(rng)};
        const Axial own = owning_axial(f, p);
        int holders = 0;
        for (int q = -1; q <= 1; ++q)
            for (int r = -1; r <= 1; ++r) {
                const Axial a{own.q + q, own.r + r};
                if (point_in_hex(p, axial_center(f, a), f)) {
                    ++holders;
                    CHECK(a == own);
                }
            }
        CHECK(holders == 1);
    }
}

TEST_CASE("adjacent centers sit at sqrt(3)*side, giving the r_tx >= sqrt(3)*r_s link") {
    const HexFrame f = frame_of({3.0, 4.0}, 0.9, 5.0);
    const Axial home{2, -1};
    const Point c = axial_center(f, home);
    const auto adj = adjacent_axials(home);
    REQUIRE(adj.size() == 6);
    for (Axial a : adj)
        CHECK(distance(c, axial_center(f, a)) == doctest::Approx(8.6602540378).epsilon(1e-9));
    // and the same set through the center-based helper
    const auto centers = adjacent_centers(f, c);
    REQUIRE(centers.size() == 6);
    for (std::size_t k = 0; k < 6; ++k)
        CHECK(distance(centers[k], axial_center(f, adj[k])) < 1e-9);
}

TEST_CASE("hex vertices are at side length from the center") {
    const HexFrame f = frame_of({0, 0}, 0.2, 5.0);
    const auto vs = hex_vertices(f, {1, 1});
    REQUIRE(vs.size() == 6);
    const Point c = axial_center(f, {1, 1});
    for (const Point& v : vs) CHECK(distance(c, v) == doctest::Approx(5.0).epsilon(1e-9));
    // consecutive vertices are one side apart
    for (int k = 0; k < 6; ++k)
        CHECK(distance(vs[k], vs[(k + 1) % 6]) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("tile_distance is a metric on the lattice") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-8, 8);
    for (int i = 0; i < 300; ++i) {
        const Axial a{d(rng), d(rng)}, b{d(rng), d(rng)}, c{d(rng), d(rng)};
        CHECK(tile_distance(a, a) == 0);
        CHECK(tile_distance(a, b) == tile_distance(b, a));
        CHECK(tile_distance(a, c) <= tile_distance(a, b) + tile_distance(b, c));
    }
    CHECK(tile_distance({0, 0}, {1, 0}) == 1);
    CHECK(tile_distance({0, 0}, {1, -1}) == 1);
    CHECK(tile_distance({0, 0}, {2, -1}) == 2);
    CHECK(tile_distance({0, 0}, {3, 2}) == 5);
}

TEST_CASE("polygon basics: area, containment, simplicity") {
    Polygon sq{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}};
    CHECK(sq.area() == doctest::Approx(100.0));
    CHECK(sq.is_simple());
    CHECK(sq.contains({5, 5}));
    CHECK(!sq.contains({-1, 5}));
    CHECK(!sq.contains({5, 11}));
    Point lo, hi;
    sq.bounds(lo, hi);
    CHECK(lo == Point{0, 0});
    CHECK(hi == Point{10, 10});

    Polygon bow{{{0, 0}, {10, 10}, {10, 0}, {0, 10}}};
    CHECK(!bow.is_simple());
}

TEST_CASE("segments_intersect agrees with hand cases") {
    CHECK(segments_intersect({0, 0}, {10, 10}, {0, 10}, {10, 0}));
    CHECK(!segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    CHECK(segments_intersect({0, 0}, {2, 0}, {1, 0}, {1, 5}));   // touching
    CHECK(!segments_intersect({0, 0}, {1, 1}, {2, 2}, {3, 3}));  // collinear disjoint
}

TEST_CASE("hex_intersects_polygon: inside, overlapping, and far tiles") {
    const HexFrame f = frame_of({40, 40}, 0.0, 5.0);
    Polygon aoi{{{0, 0}, {80, 0}, {80, 80}, {0, 80}}};
    CHECK(hex_intersects_polygon(f, {0, 0}, aoi));
    // a tile whose center is just outside still overlaps across the boundary
    const Axial outside_near = owning_axial(f, {82.0, 40.0});
    CHECK(hex_intersects_polygon(f, outside_near, aoi));
    const Axial far_away = owning_axial(f, {200.0, 200.0});
    CHECK(!hex_intersects_polygon(f, far_away, aoi));
}

TEST_CASE("tiles_crossed starts and ends at the owning tiles and is edge-connected") {
    const HexFrame f = frame_of({0.7, -1.2}, 0.45, 5.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const Point a{coord(rng), coord(rng)};
        const Point b{coord(rng), coord(rng)};
        const auto tiles = tiles_crossed(a, b, f);
        REQUIRE(!tiles.empty());
        CHECK(tiles.front() == owning_axial(f, a));
        CHECK(tiles.back() == owning_axial(f, b));
        for (std::size_t k = 0; k + 1 < tiles.size(); ++k)
            CHECK(tile_distance(tiles[k], tiles[k + 1]) == 1);
    }
}

TEST_CASE("segment_hex_entry: crossing into an adjacent tile halfway") {
    const HexFrame f = frame_of({0, 0}, 0.0, 5.0);
    const Axial from{0, 0};
    for (Axial to : adjacent_axials(from)) {
        const Point a = axial_center(f, from);
        const Point b = axial_center(f, to);
        const auto t = segment_hex_entry(a, b, f, to);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(0.5).epsilon(1e-9));
    }
    // a segment that never reaches the tile
    CHECK(!segment_hex_entry({0, 0}, {1, 0}, f, Axial{5, 5}).has_value());
}

TEST_CASE("coverage_fraction matches the disk-in-square area ratio") {
    Polygon sq{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}};
    const double got = coverage_fraction({{5, 5}}, sq, 5.0, 0.05);
    CHECK(got == doctest::Approx(M_PI / 4.0).epsilon(0.01));
    CHECK(coverage_fraction({}, sq, 5.0, 0.25) == 0.0);
    // full cover with a generous disk
    CHECK(coverage_fraction({{5, 5}}, sq, 8.0, 0.25) == 1.0);
}

TEST_CASE("a snapped lattice covers its own tiles completely") {
    const HexFrame f = frame_of({40, 40}, 0.1, 5.0);
    Polygon aoi{{{20, 20}, {60, 20}, {60, 60}, {20, 60}}};
    std::vector<Point> snapped;
    for (int q = -5; q <= 5; ++q)
        for (int r = -5; r <= 5; ++r)
            if (hex_intersects_polygon(f, {q, r}, aoi)) snapped.push_back(axial_center(f, {q, r}));
    CHECK(coverage_fraction(snapped, aoi, 5.0, 0.1) == 1.0);
}
