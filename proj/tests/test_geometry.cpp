#include "forcekit/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace forcekit::geom;

TEST_CASE("convex hull") {
    const auto sq = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {1, 1}});
    REQUIRE(sq.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(orient(sq[i], sq[(i + 1) % 4], sq[(i + 2) % 4]) > 0);

    CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}, {0.5, 0.5}}).size() == 2);
    CHECK(convex_hull({{3, 4}, {3, 4}, {3, 4}}).size() == 1);
    CHECK(convex_hull({}).empty());
}

TEST_CASE("property: hull encloses its input, turns left, and is idempotent") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vec2> pts(3 + trial % 40);
        for (auto& p : pts) p = {g(rng), g(rng)};
        const auto h = convex_hull(pts);
        REQUIRE(h.size() >= 3);
        for (std::size_t i = 0; i < h.size(); ++i) CHECK(orient(h[i], h[(i + 1) % h.size()], h[(i + 2) % h.size()]) > 0);
        for (const auto& p : pts) CHECK(point_polygon_distance(p, h) == 0.0);
        CHECK(convex_hull(h) == h);
    }
}

TEST_CASE("property: hull survives near-vertical edges with ulp-level ties") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 30; ++i) {
            // x is 0.4 up to one ulp either way, like iterates of a map whose
            // displacement saturates.
            const double x = std::nextafter(0.4, (rng() % 3 == 0) ? 0.0 : (rng() % 2 ? 1.0 : 0.4));
            pts.push_back({x, u(rng)});
            pts.push_back({u(rng) * 0.4, u(rng)});
        }
        const auto h = convex_hull(pts);
        for (const auto& p : pts) CHECK(point_polygon_distance(p, h) <= 1e-12);
    }
}

TEST_CASE("point to polygon distance") {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(point_polygon_distance({0.5, 0.5}, sq) == 0.0);
    CHECK(point_polygon_distance({2, 0.5}, sq) == doctest::Approx(1.0));
    CHECK(point_polygon_distance({4, 5}, sq) == doctest::Approx(5.0));
    const std::vector<Vec2> seg{{0, 0}, {2, 0}};
    CHECK(point_polygon_distance({1, 3}, seg) == doctest::Approx(3.0));
    CHECK(point_polygon_distance({-3, 4}, seg) == doctest::Approx(5.0));
    const std::vector<Vec2> pt{{1, 1}};
    CHECK(point_polygon_distance({4, 5}, pt) == doctest::Approx(5.0));
}

TEST_CASE("hausdorff distance") {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const std::vector<Vec2> moved{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
    CHECK(hausdorff(sq, sq) == 0.0);
    CHECK(hausdorff(sq, moved) == doctest::Approx(0.5).epsilon(1e-9));
    const std::vector<Vec2> pt{{0.5, 0.5}};
    CHECK(hausdorff(sq, pt) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    const std::vector<Vec2> seg{{0, 0}, {1, 0}};
    CHECK(hausdorff(seg, sq) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("segments and clipping") {
    CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    CHECK(segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));
    CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));
    CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    const auto t = segment_intersection_param({0, 0}, {4, 0}, {1, -1}, {1, 1});
    REQUIRE(t);
    CHECK(*t == doctest::Approx(0.25));
    CHECK_FALSE(segment_intersection_param({0, 0}, {4, 0}, {5, -1}, {5, 1}));

    const Box box{{0, 0}, {1, 1}};
    const auto c = clip_segment({-1, 0.5}, {3, 0.5}, box);
    REQUIRE(c);
    CHECK(c->first == doctest::Approx(0.25));
    CHECK(c->second == doctest::Approx(0.5));
    CHECK_FALSE(clip_segment({-1, 2}, {3, 2}, box));
    CHECK(point_segment_distance({1, 1}, {0, 0}, {2, 0}) == doctest::Approx(1.0));
    CHECK(project_to_segment({5, 1}, {0, 0}, {2, 0}) == 1.0);
}

TEST_CASE("boundary sampling keeps vertices") {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto s = sample_boundary(sq, 40);
    CHECK(s.size() >= 36);
    for (const auto& v : sq) CHECK(std::find(s.begin(), s.end(), v) != s.end());
    for (const auto& p : s) CHECK(point_polygon_distance(p, sq) == 0.0);
}
