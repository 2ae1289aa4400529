#include "forcekit/geometry.hpp"

#include <algorithm>
#include <limits>

namespace forcekit::geom {

double project_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 == 0) return 0;
    return std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double t = project_to_segment(p, a, b);
    return dist(p, a + t * (b - a));
}

namespace {

int sign(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

bool on_segment(Vec2 p, Vec2 a, Vec2 b, double eps) {
    return std::min(a.x, b.x) - eps <= p.x && p.x <= std::max(a.x, b.x) + eps &&
           std::min(a.y, b.y) - eps <= p.y && p.y <= std::max(a.y, b.y) + eps;
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
    return segment_intersection_param(a, b, c, d, eps).has_value();
}

std::optional<double> segment_intersection_param(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
    // Orientation signs are scaled by the segment lengths so eps is a distance.
    const double lab = std::max(norm(b - a), 1e-300);
    const double lcd = std::max(norm(d - c), 1e-300);
    const int o1 = sign(orient(a, b, c) / lab, eps);
    const int o2 = sign(orient(a, b, d) / lab, eps);
    const int o3 = sign(orient(c, d, a) / lcd, eps);
    const int o4 = sign(orient(c, d, b) / lcd, eps);
    if (o1 * o2 < 0 && o3 * o4 < 0) {
        const double denom = cross(b - a, d - c);
        return std::clamp(cross(c - a, d - c) / denom, 0.0, 1.0);
    }
    std::optional<double> best;
    auto consider = [&](double t) {
        if (!best || t < *best) best = t;
    };
    if (o1 == 0 && on_segment(c, a, b, eps)) consider(project_to_segment(c, a, b));
    if (o2 == 0 && on_segment(d, a, b, eps)) consider(project_to_segment(d, a, b));
    if (o3 == 0 && on_segment(a, c, d, eps)) consider(0.0);
    if (o4 == 0 && on_segment(b, c, d, eps)) consider(1.0);
    if (!best && o1 * o2 <= 0 && o3 * o4 <= 0 && (o1 != 0 || o2 != 0) && (o3 != 0 || o4 != 0)) {
        const double denom = cross(b - a, d - c);
        if (denom != 0) consider(std::clamp(cross(c - a, d - c) / denom, 0.0, 1.0));
    }
    return best;
}

std::optional<std::pair<double, double>> clip_segment(Vec2 a, Vec2 b, const Box& box) {
    double t0 = 0, t1 = 1;
    const Vec2 d = b - a;
    const double p[4] = {-d.x, d.x, -d.y, d.y};
    const double q[4] = {a.x - box.lo.x, box.hi.x - a.x, a.y - box.lo.y, box.hi.y - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0) {
            if (q[i] < 0) return std::nullopt;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0)
            t0 = std::max(t0, r);
        else
            t1 = std::min(t1, r);
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points, double eps) {
    std::sort(points.begin(), points.end(),
              [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() <= 1) return points;
    double scale = 0;
    for (const auto& p : points) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    const double tol = eps * std::max(1.0, scale);

    // Exact orientation sign for the chain; tolerance only in the cleanup, so a
    // chain that doubles back along a near-vertical edge keeps its extremes.
    std::vector<Vec2> hull(2 * points.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
        hull[k++] = points[i];
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && orient(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);

    // Merge vertices closer than tol, then drop vertices within tol of the
    // chord through their neighbours.
    std::vector<Vec2> out;
    for (const auto& v : hull)
        if (out.empty() || dist(out.back(), v) > tol) out.push_back(v);
    while (out.size() > 1 && dist(out.front(), out.back()) <= tol) out.pop_back();
    for (bool changed = true; changed && out.size() > 2;) {
        changed = false;
        for (std::size_t i = 0; i < out.size() && out.size() > 2; ++i) {
            const Vec2 a = out[(i + out.size() - 1) % out.size()];
            const Vec2 c = out[(i + 1) % out.size()];
            if (point_segment_distance(out[i], a, c) <= tol) {
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (out.size() == 2 && dist(out[0], out[1]) <= tol) out.pop_back();
    return out;
}

double point_polygon_distance(Vec2 p, std::span<const Vec2> polygon) {
    if (polygon.empty()) return std::numeric_limits<double>::infinity();
    if (polygon.size() == 1) return dist(p, polygon[0]);
    if (polygon.size() == 2) return point_segment_distance(p, polygon[0], polygon[1]);
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2 a = polygon[i], b = polygon[(i + 1) % polygon.size()];
        if (orient(a, b, p) < 0) inside = false;
        best = std::min(best, point_segment_distance(p, a, b));
    }
    return inside ? 0.0 : best;
}

std::vector<Vec2> sample_boundary(std::span<const Vec2> polygon, std::size_t count) {
    std::vector<Vec2> out(polygon.begin(), polygon.end());
    if (polygon.size() < 2) return out;
    const std::size_t edges = polygon.size() == 2 ? 1 : polygon.size();
    double perimeter = 0;
    for (std::size_t i = 0; i < edges; ++i) perimeter += dist(polygon[i], polygon[(i + 1) % polygon.size()]);
    if (perimeter == 0 || count <= out.size()) return out;
    const double step = perimeter / static_cast<double>(count - out.size());
    double carry = 0;
    for (std::size_t i = 0; i < edges; ++i) {
        const Vec2 a = polygon[i], b = polygon[(i + 1) % polygon.size()];
        const double len = dist(a, b);
        double s = carry;
        while (s < len) {
            if (s > 0) out.push_back(a + (s / len) * (b - a));
            s += step;
        }
        carry = s - len;
    }
    return out;
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b, std::size_t samples) {
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 0;
    double h = 0;
    for (const auto& p : sample_boundary(a, samples)) h = std::max(h, point_polygon_distance(p, b));
    for (const auto& p : sample_boundary(b, samples)) h = std::max(h, point_polygon_distance(p, a));
    return h;
}

}  // namespace forcekit::geom
