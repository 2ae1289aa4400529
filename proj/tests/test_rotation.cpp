#include "forcekit/rotation.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace forcekit;
using namespace forcekit::rotation;

namespace {

constexpr double kPi = std::numbers::pi;

TorusLift raised_cosine_shear() { return TorusLift({HorizontalShear{Profile::raised_cosine, 1.0}}); }
// Horizontal sine shear first, then vertical.
TorusLift coupled_shear(double a = 0.4) {
    return TorusLift({HorizontalShear{Profile::sine, a}, VerticalShear{Profile::sine, a}});
}

double area(const std::vector<Vec2>& p) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += geom::cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * s;
}

// Interval enclosure of sin(2 pi t) for t in [lo, hi].
std::pair<double, double> sin_range(double lo, double hi) {
    if (hi - lo >= 1) return {-1, 1};
    double a = std::sin(2 * kPi * lo), b = std::sin(2 * kPi * hi);
    double mn = std::min(a, b), mx = std::max(a, b);
    // Extrema of sin(2 pi t) sit at t = 1/4 + k/2.
    for (double k = std::floor(2 * lo - 0.5); k <= std::ceil(2 * hi); ++k) {
        const double t = 0.25 + k / 2;
        if (t < lo || t > hi) continue;
        const double v = std::sin(2 * kPi * t);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    return {mn - 1e-12, mx + 1e-12};
}

// True when the fixed-point field of the coupled shear, (a sin 2pi y,
// a sin 2pi x'), x' = x + a sin 2pi y, is provably nonzero on the box.
bool field_excludes_zero(const Box& b, double a) {
    const auto sy = sin_range(b.lo.y, b.hi.y);
    if (sy.first > 1e-6 || sy.second < -1e-6) return true;
    const auto sx = sin_range(b.lo.x + a * sy.first, b.hi.x + a * sy.second);
    return sx.first > 1e-6 || sx.second < -1e-6;
}

}  // namespace

TEST_CASE("equivariance of constructed lifts") {
    const std::vector<TorusLift> lifts{
        TorusLift::identity(),
        TorusLift::translation({0.5, 1.0 / 3}),
        raised_cosine_shear(),
        coupled_shear(),
        TorusLift({IntegerTranslation{2, -1}, VerticalShear{Profile::raised_cosine, 0.7}}),
        TorusLift({HorizontalShear{Profile::sine, 0.3}}, UnimodularMatrix{1, 1, 0, 1}),
        coupled_shear().power(3),
    };
    for (const auto& g : lifts) CHECK(equivariance_defect(g, 100, 42) <= 1e-12);
    CHECK_THROWS_AS(TorusLift({}, UnimodularMatrix{2, 0, 0, 1}), InputError);
}

TEST_CASE("inverse and iteration") {
    const auto g = coupled_shear();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const Vec2 z{u(rng), u(rng)};
        CHECK(geom::dist(g.inverse(g(z)), z) < 1e-12);
        CHECK(geom::dist(g.iterate(z, 3), g(g(g(z)))) < 1e-12);
        CHECK(geom::dist(g.power(3)(z), g.iterate(z, 3)) < 1e-12);
    }
}

TEST_CASE("displacement") {
    const auto t = TorusLift::translation({0.5, 1.0 / 3});
    for (int n : {1, 7, 100}) {
        const auto d = displacement(t, {0.2, -3.1}, n);
        CHECK(d.x == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d.y == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    const auto s = raised_cosine_shear();
    for (int n : {1, 5, 64}) {
        const auto d = displacement(s, {0, 0.5}, n);
        CHECK(d.x == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(d.y) < 1e-15);
        const auto o = displacement(s, {0, 0}, n);
        CHECK(o.x == 0.0);
        CHECK(o.y == 0.0);
    }
}

TEST_CASE("rotation set estimates") {
    const auto t = rotation_set_estimate(TorusLift::translation({0.3, 0.7}), {16, 0, 32});
    REQUIRE(t.vertices.size() == 1);
    CHECK(geom::dist(t.vertices[0], {0.3, 0.7}) < 1e-12);

    const auto s = rotation_set_estimate(raised_cosine_shear(), {256, 0, 256});
    const RotationPolygon segment{{{0, 0}, {1, 0}}, {}};
    CHECK(hausdorff(s, segment) <= 1e-2);

    const auto c = rotation_set_estimate(coupled_shear(), {64, 0, 256});
    CHECK(c.vertices.size() >= 3);
    CHECK(area(c.vertices) > 1e-3);
    CHECK(geom::point_polygon_distance({0, 0}, c.vertices) == 0.0);
    // A rational vector certified by a periodic orbit lies well inside.
    const auto fixed = find_periodic(coupled_shear(), {0, 0}, 1, Box{{-0.1, -0.1}, {0.1, 0.1}});
    REQUIRE(fixed.point);
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        const Vec2 a = c.vertices[i], b = c.vertices[(i + 1) % c.vertices.size()];
        CHECK(geom::orient(a, b, {0, 0}) / geom::dist(a, b) > 0.01);
    }
}

TEST_CASE("homogeneity") {
    CHECK(check_homogeneity(TorusLift::translation({0.3, 0.7}), 3, {16, 0, 32}) <= 1e-12);
    CHECK(check_homogeneity(raised_cosine_shear(), 2, {64, 0, 64}) <= 1e-2);
    CHECK(check_homogeneity(coupled_shear(), 1, {8, 0, 16}) == 0.0);
}

TEST_CASE("property: changing the lift by an integer vector translates the estimate") {
    const Budget b{12, 2, 40};
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> k(-3, 3);
    for (const auto& g : {coupled_shear(), raised_cosine_shear(), TorusLift::translation({0.25, -0.4})}) {
        const auto base = rotation_set_estimate(g, b);
        for (int trial = 0; trial < 3; ++trial) {
            const std::int64_t vx = k(rng), vy = k(rng);
            auto comp = g.composition();
            comp.insert(comp.begin(), IntegerTranslation{vx, vy});
            const auto moved = rotation_set_estimate(TorusLift(comp), b);
            CHECK(hausdorff(moved, translated(base, {double(vx), double(vy)})) <= 1e-9);
        }
    }
}

TEST_CASE("property: conjugacy by an integer shear") {
    const Budget b{16, 0, 64};
    for (const UnimodularMatrix m : {UnimodularMatrix{1, 1, 0, 1}, UnimodularMatrix{1, 0, -2, 1}, UnimodularMatrix{0, 1, -1, 0}}) {
        const auto g = coupled_shear();
        const auto rho = rotation_set_estimate(g, b);
        const auto conj = rotation_set_estimate(g.conjugated(m), b);
        RotationPolygon image{{}, b};
        for (const auto& v : rho.vertices) image.vertices.push_back(m.apply(v));
        image.vertices = geom::convex_hull(image.vertices);
        CHECK(hausdorff(conj, image) <= 1e-6);
    }
}

TEST_CASE("degree on a box") {
    CHECK(degree_on_box(TorusLift::translation({0.3, 0}), 1, {0, 0}, Box{{-0.7, 0.2}, {0.4, 0.9}}).degree == 0);
    const auto c = degree_on_box(coupled_shear(), 1, {0, 0}, Box{{-0.1, -0.1}, {0.1, 0.1}});
    CHECK(c.degree != 0);
    CHECK(c.min_norm > kDegreeThreshold);
    CHECK(degree_on_box(TorusLift::identity(), 1, {1, 0}, Box{{-3, -3}, {3, 3}}).degree == 0);
    // The fixed point (1/2, 0) lies on this boundary.
    CHECK_THROWS_AS(degree_on_box(coupled_shear(), 1, {0, 0}, Box{{0.5, -0.1}, {0.7, 0.1}}), IndeterminateBoundary);
}

TEST_CASE("property: degree soundness against an interval oracle") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> corner(-1, 1), side(0.03, 0.4);
    const double a = 0.4;
    const auto g = coupled_shear(a);
    int zero_checked = 0, nonzero_checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Vec2 lo{corner(rng), corner(rng)};
        const Box box{lo, lo + Vec2{side(rng), side(rng)}};
        DegreeCertificate cert;
        try {
            cert = degree_on_box(g, 1, {0, 0}, box);
        } catch (const IndeterminateBoundary&) {
            continue;
        }
        if (field_excludes_zero(box, a)) {
            CHECK(cert.degree == 0);
            ++zero_checked;
        }
        if (cert.degree != 0) {
            const auto found = find_periodic(g, {0, 0}, 1, box);
            if (found.point) {
                ++nonzero_checked;
                CHECK(found.residual < kResidualTolerance);
                CHECK(geom::dist(g(*found.point), *found.point) < kResidualTolerance);
            }
        }
    }
    CHECK(zero_checked > 50);
    CHECK(nonzero_checked > 5);
}

TEST_CASE("periodic point search") {
    const auto half = TorusLift::translation({0.5, 0});
    const auto a = find_periodic(half, {1, 0}, 2, Box{{-0.25, -0.25}, {0.25, 0.25}});
    REQUIRE(a.point);
    CHECK(a.residual < 1e-12);

    const auto b = find_periodic(coupled_shear(), {0, 0}, 1, Box{{-0.25, -0.25}, {0.25, 0.25}});
    REQUIRE(b.point);
    CHECK(b.method == "degree");
    CHECK(b.residual < 1e-8);
    CHECK(geom::norm(*b.point) < 1e-6);

    const auto c = find_periodic(half, {0, 1}, 1, Box{{-0.25, -0.25}, {0.25, 0.25}});
    CHECK_FALSE(c.point);
    CHECK(c.method == "failure");
}

TEST_CASE("deviation profiles") {
    const std::vector<int> ns{16, 64, 256};
    const auto t = TorusLift::translation({0.3, 0.7});
    for (const auto& e : deviation_profile(t, rotation_set_estimate(t, {8, 0, 16}), 8, ns)) CHECK(e.deviation < 1e-9);

    const RotationPolygon segment{{{0, 0}, {1, 0}}, {}};
    for (const auto& e : deviation_profile(raised_cosine_shear(), segment, 16, ns)) CHECK(e.deviation < 1e-9);

    const auto g = coupled_shear();
    const auto rho = rotation_set_estimate(g, {32, 0, 256});
    const auto prof = deviation_profile(g, rho, 8, {16, 64, 256, 1024});
    REQUIRE(prof.size() == 4);
    CHECK(prof.back().n == 1024);
    CHECK(prof.back().deviation < 0.1 * 1024);
}

TEST_CASE("rotation vectors of measures") {
    const auto t = measure_rotation(TorusLift::translation({0.3, -0.2}), EmpiricalMeasure::uniform_grid(8));
    CHECK(geom::dist(t, {0.3, -0.2}) < 1e-12);

    const auto mu = EmpiricalMeasure::uniform_grid(32);
    REQUIRE(mu.points().size() == 1024);
    double total = 0;
    for (double w : mu.weights()) total += w;
    CHECK(std::abs(total - 1) < 1e-12);
    const auto r = measure_rotation(raised_cosine_shear(), mu);
    CHECK(std::abs(r.x - 0.5) < 1e-6);
    CHECK(std::abs(r.y) < 1e-6);

    CHECK(geom::norm(measure_rotation(coupled_shear(), EmpiricalMeasure::dirac({0, 0}))) < 1e-15);
    CHECK_THROWS_AS(EmpiricalMeasure({{0, 0}}, {-1.0}), InputError);
    CHECK_THROWS_AS(EmpiricalMeasure({{0, 0}, {1, 1}}, {0.5, 0.6}), InputError);
}

TEST_CASE("boundary diagnostic") {
    const double inv_phi = 2 / (1 + std::sqrt(5.0));
    CHECK(boundary_diagnostic({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}}, 10).empty());
    CHECK(boundary_diagnostic({{{0, 0}, {1, inv_phi}}, {}}, 50).empty());
    const auto flagged = boundary_diagnostic({{{-1, -inv_phi}, {1, inv_phi}}, {}}, 50);
    REQUIRE_FALSE(flagged.empty());
    CHECK(geom::norm(flagged[0].rational_point) < 1e-12);
    CHECK(boundary_diagnostic({{{0.3, 0.4}}, {}}, 50).empty());
    // Rational slope 1/2 is never flagged.
    CHECK(boundary_diagnostic({{{-1, -0.5}, {1, 0.5}}, {}}, 50).empty());
}

TEST_CASE("rational approximation") {
    CHECK(rational_approximation(0.5, 10) == std::pair<std::int64_t, std::int64_t>{1, 2});
    CHECK(rational_approximation(1.0 / 3 + 1e-12, 10) == std::pair<std::int64_t, std::int64_t>{1, 3});
    CHECK(rational_approximation(-2.0, 10) == std::pair<std::int64_t, std::int64_t>{-2, 1});
    CHECK_FALSE(rational_approximation(2 / (1 + std::sqrt(5.0)), 50));
    CHECK_FALSE(rational_approximation(std::numbers::pi, 100));
}
