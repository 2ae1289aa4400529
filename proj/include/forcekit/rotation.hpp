#pragma once

// Torus-lift dynamics: rotation sets, periodic orbits located by topological
// degree, deviation profiles and rotation vectors of measures.

#include "forcekit/error.hpp"
#include "forcekit/geometry.hpp"
#include "forcekit/profile.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace forcekit::rotation {

using geom::Box;
using geom::Vec2;

struct IntegerTranslation {
    std::int64_t dx = 0, dy = 0;
};
struct RealTranslation {
    Vec2 v;
};
// x <- x + amplitude * profile(y)
struct HorizontalShear {
    Profile profile = Profile::sine;
    double amplitude = 0;
};
// y <- y + amplitude * profile(x)
struct VerticalShear {
    Profile profile = Profile::sine;
    double amplitude = 0;
};

using Primitive = std::variant<IntegerTranslation, RealTranslation, HorizontalShear, VerticalShear>;

// Integer matrix with determinant +-1, used as a change of coordinates.
struct UnimodularMatrix {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    std::int64_t det() const { return a * d - b * c; }
    Vec2 apply(Vec2 z) const {
        return {static_cast<double>(a) * z.x + static_cast<double>(b) * z.y,
                static_cast<double>(c) * z.x + static_cast<double>(d) * z.y};
    }
    UnimodularMatrix inverse() const;
};

// Z^2-equivariant lift of a torus homeomorphism. Primitives apply in list
// order (the first entry acts first). An optional frame M turns the lift
// into M o g o M^-1.
class TorusLift {
public:
    TorusLift() = default;
    explicit TorusLift(std::vector<Primitive> composition, std::optional<UnimodularMatrix> frame = {});

    static TorusLift translation(Vec2 v);
    static TorusLift identity() { return TorusLift{}; }

    Vec2 operator()(Vec2 z) const;
    Vec2 inverse(Vec2 z) const;
    Vec2 iterate(Vec2 z, int n) const;

    const std::vector<Primitive>& composition() const { return composition_; }
    const std::optional<UnimodularMatrix>& frame() const { return frame_; }

    // g^k as a single lift.
    TorusLift power(int k) const;
    // this o other (other acts first). Frames must agree.
    TorusLift then(const TorusLift& after) const;
    TorusLift conjugated(const UnimodularMatrix& m) const;

private:
    Vec2 apply_raw(Vec2 z) const;
    Vec2 inverse_raw(Vec2 z) const;

    std::vector<Primitive> composition_;
    std::optional<UnimodularMatrix> frame_;
};

// Largest |g(z + v) - g(z) - v| over `samples` random (z, v in {-2..2}^2)
// pairs drawn from a fixed seed.
double equivariance_defect(const TorusLift& g, int samples = 100, std::uint64_t seed = 1);

// (g^n(z) - z) / n
Vec2 displacement(const TorusLift& g, Vec2 z, int n);

struct Budget {
    int grid = 64;    // m: start points (i/m, j/m)
    int skip = 0;     // N: iterates n' <= N are ignored
    int steps = 256;  // n: last iterate
};

// Counterclockwise convex polygon, possibly a segment or a point.
struct RotationPolygon {
    std::vector<Vec2> vertices;
    Budget budget;
};

RotationPolygon rotation_set_estimate(const TorusLift& g, const Budget& budget);

RotationPolygon scaled(const RotationPolygon& p, double factor);
RotationPolygon translated(const RotationPolygon& p, Vec2 v);

double hausdorff(const RotationPolygon& a, const RotationPolygon& b);

// Hausdorff distance between the estimate for g^k and k times the estimate
// for g, both with the same budget.
double check_homogeneity(const TorusLift& g, int k, const Budget& budget);

class IndeterminateBoundary : public DomainError {
public:
    using DomainError::DomainError;
};

struct DegreeCertificate {
    Box box;
    int q = 1;
    std::array<std::int64_t, 2> p{0, 0};
    int degree = 0;
    double min_norm = 0;       // smallest |field| on the sampled boundary
    double threshold = 1e-9;   // indeterminate below this
    std::size_t samples = 0;
};

inline constexpr double kDegreeThreshold = 1e-9;
inline constexpr std::size_t kMaxDegreeSamples = std::size_t{1} << 20;

// Winding number of z -> g^q(z) - z - p around the box boundary. Throws
// IndeterminateBoundary when the field comes within kDegreeThreshold of 0 on
// the boundary or the sample cap is hit.
DegreeCertificate degree_on_box(const TorusLift& g, int q, std::array<std::int64_t, 2> p, const Box& box);


struct PeriodicSearch {
    std::optional<Vec2> point;
    double residual = 0;
    // Every degree evaluated, in search order.
    std::vector<DegreeCertificate> certificates;
    std::size_t depth = 0;
    std::size_t retries = 0;
    // "degree", "direct" (zero residual at the seed centre) or "failure".
    std::string method;
};

inline constexpr double kTargetDiameter = 1e-10;
inline constexpr double kResidualTolerance = 1e-8;
inline constexpr int kMaxSubdivisionDepth = 40;
inline constexpr int kMaxPerturbations = 8;

// Looks for z with g^q(z) = z + p by degree-guided subdivision of the seed box.
PeriodicSearch find_periodic(const TorusLift& g, std::array<std::int64_t, 2> p, int q, const Box& seed);

struct DeviationEntry {
    int n = 0;
    double deviation = 0;  // max over grid of dist(g^n(z) - z, n * rho)
};

std::vector<DeviationEntry> deviation_profile(const TorusLift& g, const RotationPolygon& rho, int grid,
                                              const std::vector<int>& n_list);

class EmpiricalMeasure {
public:
    EmpiricalMeasure(std::vector<Vec2> points, std::vector<double> weights);
    static EmpiricalMeasure uniform_grid(int m);
    static EmpiricalMeasure dirac(Vec2 z);

    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<Vec2> points_;
    std::vector<double> weights_;
};

Vec2 measure_rotation(const TorusLift& g, const EmpiricalMeasure& mu);

struct FlaggedEdge {
    std::size_t index = 0;  // edge from vertex index to index + 1
    Vec2 a, b;
    double slope = 0;
    Vec2 rational_point;  // witness inside the edge
};

// Edges with a slope that is not p/q for q <= max_denominator and an interior
// point with both coordinates of denominator <= max_denominator.
std::vector<FlaggedEdge> boundary_diagnostic(const RotationPolygon& polygon, int max_denominator);

// Best rational approximation with denominator <= max_denominator; returns
// (p, q) if |value - p/q| <= tol.
std::optional<std::pair<std::int64_t, std::int64_t>> rational_approximation(double value, int max_denominator,
                                                                            double tol = 1e-9);

}  // namespace forcekit::rotation
