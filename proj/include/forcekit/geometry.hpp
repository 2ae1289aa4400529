#pragma once

// Small 2-D toolkit shared by the rotation lab and the planar forcing code.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace forcekit::geom {

struct Vec2 {
    double x = 0;
    double y = 0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
// > 0 when c is to the left of the directed line a -> b.
inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

struct Segment {
    Vec2 a, b;
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
// Closest point on segment [a, b] to p, returned as a parameter in [0, 1].
double project_to_segment(Vec2 p, Vec2 a, Vec2 b);

// Closed-segment intersection with tolerance eps on the orientation tests.
// Collinear overlap counts.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps = 1e-12);
// Intersection point(s) parameter along [a, b] for a proper or touching
// crossing; nullopt when disjoint. Collinear overlap reports the first
// overlapping parameter.
std::optional<double> segment_intersection_param(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps = 1e-12);

struct Box {
    Vec2 lo;
    Vec2 hi;

    bool contains(Vec2 p, double eps = 0) const {
        return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps;
    }
    double diameter() const { return dist(lo, hi); }
    Vec2 center() const { return 0.5 * (lo + hi); }
    std::array<Vec2, 4> corners() const { return {lo, Vec2{hi.x, lo.y}, hi, Vec2{lo.x, hi.y}}; }
};

// Liang-Barsky clip of segment [a, b] against the box; returns the parameter
// range inside, if any.
std::optional<std::pair<double, double>> clip_segment(Vec2 a, Vec2 b, const Box& box);

// Counterclockwise convex hull with collinear and duplicate points (within
// eps) removed. Degenerate inputs yield 1 or 2 vertices.
std::vector<Vec2> convex_hull(std::vector<Vec2> points, double eps = 1e-12);

// Distance from p to a convex polygon given counterclockwise (0 inside).
// Handles the point and segment cases.
double point_polygon_distance(Vec2 p, std::span<const Vec2> polygon);

// Evenly spaced boundary samples (vertices always included).
std::vector<Vec2> sample_boundary(std::span<const Vec2> polygon, std::size_t count);

// Hausdorff distance between two convex polygons from boundary samples of
// each and exact point-to-polygon distances.
double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b, std::size_t samples = 512);

}  // namespace forcekit::geom
