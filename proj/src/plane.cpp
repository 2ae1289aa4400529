#include "forcekit/plane.hpp"

#include "forcekit/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace forcekit::plane {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 unit(Vec2 v) { return v / norm(v); }

using Piece = ProperLine::Piece;

double piece_extent(const Piece& p) { return p.ray ? kInf : 1.0; }

// Intersection of two pieces as parameters s along p. A crossing yields one
// value; a collinear overlap yields the two ends of the overlap.
std::vector<double> piece_hits(const Piece& p, const Piece& q, double eps = 1e-12) {
    const Vec2 d1 = p.direction, d2 = q.direction;
    const double n1 = norm(d1), n2 = norm(d2);
    const double denom = cross(d1, d2);
    const Vec2 w = q.origin - p.origin;
    const double s1max = piece_extent(p), s2max = piece_extent(q);
    if (std::abs(denom) > 1e-13 * n1 * n2) {
        const double s = cross(w, d2) / denom;
        const double u = cross(w, d1) / denom;
        const double ts = eps / n1, tu = eps / n2;
        if (s < -ts || s > s1max + ts || u < -tu || u > s2max + tu) return {};
        return {std::clamp(s, 0.0, s1max)};
    }
    if (std::abs(cross(w, d1)) / n1 > eps) return {};
    // Collinear: project q onto p's parameter.
    const double a = dot(w, d1) / (n1 * n1);
    const double slope = dot(d2, d1) / (n1 * n1);
    double lo, hi;
    if (q.ray) {
        if (slope > 0) {
            lo = a;
            hi = kInf;
        } else {
            lo = -kInf;
            hi = a;
        }
    } else {
        lo = std::min(a, a + slope);
        hi = std::max(a, a + slope);
    }
    const double tol = eps / n1;
    const double from = std::max(lo, 0.0), to = std::min(hi, s1max);
    if (from > to + tol) return {};
    if (to - from <= tol) return {std::clamp(from, 0.0, s1max)};
    return {from, to};
}

Piece segment_piece(Vec2 a, Vec2 b) { return Piece{a, b - a, false, 0, 1}; }

struct Sample {
    Vec2 point;
    double param = 0;
};

// Points along the in-box part of a line, roughly `count` of them, always
// including polyline vertices.
std::vector<Sample> sample_line(const ProperLine& line, const Box& box, std::size_t count) {
    const auto runs = line.clipped(box);
    double total = 0;
    for (const auto& run : runs)
        for (std::size_t i = 0; i + 1 < run.size(); ++i) total += dist(run[i], run[i + 1]);
    const double spacing = total > 0 ? total / static_cast<double>(count) : 1.0;
    std::vector<Sample> out;
    for (const auto& run : runs) {
        for (std::size_t i = 0; i + 1 < run.size(); ++i) {
            const double len = dist(run[i], run[i + 1]);
            const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing)));
            for (std::size_t j = 0; j < k; ++j) {
                const Vec2 p = run[i] + (static_cast<double>(j) / static_cast<double>(k)) * (run[i + 1] - run[i]);
                out.push_back({p, line.parameter(p)});
            }
        }
        if (!run.empty()) out.push_back({run.back(), line.parameter(run.back())});
    }
    return out;
}

// Parameters s in [0, 1] where segment [a, b] meets the line.
std::vector<double> segment_line_hits(Vec2 a, Vec2 b, const ProperLine& line) {
    std::vector<double> out;
    const Piece seg = segment_piece(a, b);
    for (const auto& piece : line.pieces())
        for (double s : piece_hits(seg, piece)) out.push_back(s);
    return out;
}

std::vector<Vec2> densify(const std::vector<Vec2>& run, double max_segment) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i + 1 < run.size(); ++i) {
        const double len = dist(run[i], run[i + 1]);
        const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_segment)));
        for (std::size_t j = 0; j < k; ++j)
            out.push_back(run[i] + (static_cast<double>(j) / static_cast<double>(k)) * (run[i + 1] - run[i]));
    }
    if (!run.empty()) out.push_back(run.back());
    return out;
}
}  // namespace

std::string to_string(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::on: return "on";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::no: return "false";
        case Verdict::yes: return "true";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(Provenance::Kind k) {
    switch (k) {
        case Provenance::Kind::given: return "given";
        case Provenance::Kind::geometric_check: return "geometric-check";
        case Provenance::Kind::forcing_step: return "forcing-step";
    }
    return "?";
}

// ---------------------------------------------------------------- ProperLine

ProperLine::ProperLine(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw InputError("proper line needs at least 2 vertices");
    for (const auto& v : vertices_)
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw InputError("proper line vertex is not finite");
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const double len = dist(vertices_[i], vertices_[i + 1]);
        if (len == 0) throw InputError("proper line has repeated consecutive vertices");
        length_ += len;
    }
    if (!is_simple()) throw InputError("proper line is not simple");
}

Vec2 ProperLine::tail_direction() const { return unit(vertices_[0] - vertices_[1]); }

Vec2 ProperLine::head_direction() const {
    const std::size_t k = vertices_.size() - 1;
    return unit(vertices_[k] - vertices_[k - 1]);
}

std::vector<ProperLine::Piece> ProperLine::pieces() const {
    std::vector<Piece> out;
    out.push_back(Piece{vertices_[0], tail_direction(), true, 0, -1});
    double acc = 0;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        out.push_back(Piece{vertices_[i], vertices_[i + 1] - vertices_[i], false, acc, 1});
        acc += dist(vertices_[i], vertices_[i + 1]);
    }
    out.push_back(Piece{vertices_.back(), head_direction(), true, length_, 1});
    return out;
}

namespace {

// Closest parameter s on the piece and the distance to it.
std::pair<double, double> closest_on_piece(const Piece& p, Vec2 z) {
    double s = dot(z - p.origin, p.direction) / dot(p.direction, p.direction);
    s = std::clamp(s, 0.0, piece_extent(p));
    return {s, dist(z, p.origin + s * p.direction)};
}

double piece_param(const Piece& p, double s) { return p.param0 + p.sign * s * norm(p.direction); }

}  // namespace

double ProperLine::distance(Vec2 p) const {
    double best = kInf;
    for (const auto& piece : pieces()) best = std::min(best, closest_on_piece(piece, p).second);
    return best;
}

double ProperLine::parameter(Vec2 p) const {
    double best = kInf, param = 0;
    for (const auto& piece : pieces()) {
        auto [s, d] = closest_on_piece(piece, p);
        if (d < best) {
            best = d;
            param = piece_param(piece, s);
        }
    }
    return param;
}

Vec2 ProperLine::point_at(double t) const {
    if (t <= 0) return vertices_[0] + (-t) * tail_direction();
    if (t >= length_) return vertices_.back() + (t - length_) * head_direction();
    double acc = 0;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const double len = dist(vertices_[i], vertices_[i + 1]);
        if (t <= acc + len) return vertices_[i] + ((t - acc) / len) * (vertices_[i + 1] - vertices_[i]);
        acc += len;
    }
    return vertices_.back();
}

std::vector<std::vector<Vec2>> ProperLine::clipped(const Box& box) const {
    // Far enough that the ray ends are outside the box.
    double far = box.diameter() + 1;
    for (const auto& v : vertices_) far = std::max(far, dist(v, box.center()) + box.diameter() + 1);
    std::vector<std::pair<Vec2, Vec2>> segs;
    segs.emplace_back(vertices_[0] + far * tail_direction(), vertices_[0]);
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) segs.emplace_back(vertices_[i], vertices_[i + 1]);
    segs.emplace_back(vertices_.back(), vertices_.back() + far * head_direction());

    std::vector<std::vector<Vec2>> runs;
    for (const auto& [a, b] : segs) {
        auto range = geom::clip_segment(a, b, box);
        if (!range) continue;
        const Vec2 p = a + range->first * (b - a);
        const Vec2 q = a + range->second * (b - a);
        if (!runs.empty() && dist(runs.back().back(), p) <= 1e-12) {
            if (dist(p, q) > 0) runs.back().push_back(q);
        } else if (dist(p, q) > 0) {
            runs.push_back({p, q});
        }
    }
    return runs;
}

bool ProperLine::is_simple() const {
    const auto ps = pieces();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const auto hits = piece_hits(ps[i], ps[j]);
            if (j == i + 1) {
                // Adjacent pieces share one vertex; anything else is a fold.
                if (hits.size() > 1) return false;
                continue;
            }
            if (!hits.empty()) return false;
        }
    }
    return true;
}

bool ProperLine::intersects(const ProperLine& other) const {
    const auto a = pieces(), b = other.pieces();
    for (const auto& p : a)
        for (const auto& q : b)
            if (!piece_hits(p, q).empty()) return true;
    return false;
}

ProperLine ProperLine::reversed() const {
    std::vector<Vec2> v(vertices_.rbegin(), vertices_.rend());
    return ProperLine(std::move(v));
}

ProperLine ProperLine::translated(Vec2 v) const {
    std::vector<Vec2> out = vertices_;
    for (auto& p : out) p += v;
    return ProperLine(std::move(out));
}

Side side_of(const ProperLine& line, Vec2 z) {
    if (line.distance(z) <= kOnTolerance) return Side::on;
    const auto& vs = line.vertices();
    Box b{z, z};
    for (const auto& v : vs) {
        b.lo = {std::min(b.lo.x, v.x), std::min(b.lo.y, v.y)};
        b.hi = {std::max(b.hi.x, v.x), std::max(b.hi.y, v.y)};
    }
    const double margin = 1 + 0.1 * b.diameter();
    b.lo -= Vec2{margin, margin};
    b.hi += Vec2{margin, margin};

    auto exit_point = [&](Vec2 o, Vec2 d) {
        double t = kInf;
        if (d.x > 0) t = std::min(t, (b.hi.x - o.x) / d.x);
        if (d.x < 0) t = std::min(t, (b.lo.x - o.x) / d.x);
        if (d.y > 0) t = std::min(t, (b.hi.y - o.y) / d.y);
        if (d.y < 0) t = std::min(t, (b.lo.y - o.y) / d.y);
        return o + t * d;
    };
    const Vec2 entry = exit_point(vs.front(), line.tail_direction());
    const Vec2 leave = exit_point(vs.back(), line.head_direction());

    // Clockwise perimeter coordinate starting at the top-left corner.
    const double w = b.hi.x - b.lo.x, h = b.hi.y - b.lo.y, perimeter = 2 * (w + h);
    auto perim = [&](Vec2 p) {
        const double dt = std::abs(p.y - b.hi.y), dr = std::abs(p.x - b.hi.x);
        const double db = std::abs(p.y - b.lo.y), dl = std::abs(p.x - b.lo.x);
        const double m = std::min({dt, dr, db, dl});
        if (m == dt) return p.x - b.lo.x;
        if (m == dr) return w + (b.hi.y - p.y);
        if (m == db) return w + h + (b.hi.x - p.x);
        return 2 * w + h + (p.y - b.lo.y);
    };
    const std::array<std::pair<double, Vec2>, 4> corners{
        std::pair{0.0, Vec2{b.lo.x, b.hi.y}}, std::pair{w, b.hi}, std::pair{w + h, Vec2{b.hi.x, b.lo.y}},
        std::pair{2 * w + h, b.lo}};

    // Chain plus the clockwise boundary walk from the head exit back to the
    // tail entry encloses the right-hand side.
    std::vector<Vec2> poly;
    poly.push_back(entry);
    poly.insert(poly.end(), vs.begin(), vs.end());
    poly.push_back(leave);
    const double from = perim(leave);
    double to = perim(entry);
    if (to <= from) to += perimeter;
    for (int lap = 0; lap < 2; ++lap)
        for (const auto& [pos, corner] : corners) {
            const double p = pos + lap * perimeter;
            if (p > from && p < to) poly.push_back(corner);
        }

    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2 a = poly[i], c = poly[j];
        if ((a.y > z.y) != (c.y > z.y)) {
            const double x = a.x + (z.y - a.y) * (c.x - a.x) / (c.y - a.y);
            if (z.x < x) inside = !inside;
        }
    }
    return inside ? Side::right : Side::left;
}

double signed_distance(const ProperLine& line, Vec2 z) {
    switch (side_of(line, z)) {
        case Side::on: return 0;
        case Side::right: return line.distance(z);
        case Side::left: return -line.distance(z);
    }
    return 0;
}

// ---------------------------------------------------------------- PlanarMap

PlanarMap::PlanarMap(std::vector<MapPrimitive> composition) : composition_(std::move(composition)) {
    for (const auto& prim : composition_) {
        if (const auto* m = std::get_if<LinearMap>(&prim)) {
            if (!(m->a * m->d - m->b * m->c > 0)) throw InputError("linear map must have positive determinant");
        }
        if (const auto* t = std::get_if<Translation>(&prim)) {
            if (!std::isfinite(t->v.x) || !std::isfinite(t->v.y)) throw InputError("translation is not finite");
        }
    }
}

Vec2 PlanarMap::operator()(Vec2 z) const {
    for (const auto& prim : composition_) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Translation>) {
                    z += p.v;
                } else if constexpr (std::is_same_v<T, LinearMap>) {
                    z = {p.a * z.x + p.b * z.y, p.c * z.x + p.d * z.y};
                } else if constexpr (std::is_same_v<T, HorizontalShear>) {
                    z.x += p.amplitude * evaluate(p.profile, z.y);
                } else {
                    z.y += p.amplitude * evaluate(p.profile, z.x);
                }
            },
            prim);
    }
    return z;
}

Vec2 PlanarMap::inverse(Vec2 z) const {
    for (auto it = composition_.rbegin(); it != composition_.rend(); ++it) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Translation>) {
                    z -= p.v;
                } else if constexpr (std::is_same_v<T, LinearMap>) {
                    const double det = p.a * p.d - p.b * p.c;
                    z = {(p.d * z.x - p.b * z.y) / det, (-p.c * z.x + p.a * z.y) / det};
                } else if constexpr (std::is_same_v<T, HorizontalShear>) {
                    z.x -= p.amplitude * evaluate(p.profile, z.y);
                } else {
                    z.y -= p.amplitude * evaluate(p.profile, z.x);
                }
            },
            *it);
    }
    return z;
}

Vec2 PlanarMap::iterate(Vec2 z, int n) const {
    if (n >= 0)
        for (int i = 0; i < n; ++i) z = (*this)(z);
    else
        for (int i = 0; i < -n; ++i) z = inverse(z);
    return z;
}

// ---------------------------------------------------------------- FoliationChart

FoliationChart::FoliationChart(Box box, std::vector<std::pair<std::string, ProperLine>> leaves, bool vertical_model)
    : box_(box), leaves_(std::move(leaves)), vertical_(vertical_model) {
    validate();
}

void FoliationChart::validate_leaf(const std::string& label, const ProperLine& line) const {
    if (label.empty()) throw InputError("leaf label must be non-empty");
    if (!line.is_simple()) throw InputError("leaf '" + label + "' is not simple");
}

void FoliationChart::validate() const {
    if (!(box_.lo.x < box_.hi.x && box_.lo.y < box_.hi.y)) throw InputError("chart box is degenerate");
    std::set<std::string> seen;
    for (const auto& [label, line] : leaves_) {
        validate_leaf(label, line);
        if (!seen.insert(label).second) throw InputError("duplicate leaf label '" + label + "'");
    }
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        for (std::size_t j = i + 1; j < leaves_.size(); ++j)
            if (leaves_[i].second.intersects(leaves_[j].second))
                throw InputError("leaves '" + leaves_[i].first + "' and '" + leaves_[j].first + "' intersect");
}

bool FoliationChart::contains(const std::string& label) const {
    for (const auto& [l, line] : leaves_)
        if (l == label) return true;
    return false;
}

const ProperLine& FoliationChart::leaf(const std::string& label) const {
    for (const auto& [l, line] : leaves_)
        if (l == label) return line;
    if (vertical_ && label.rfind("x=", 0) == 0) {
        if (auto it = synthesized_.find(label); it != synthesized_.end()) return it->second;
        double c = 0;
        const char* first = label.data() + 2;
        const char* last = label.data() + label.size();
        auto [ptr, ec] = std::from_chars(first, last, c);
        if (ec != std::errc() || ptr != last) throw InputError("bad vertical leaf label '" + label + "'");
        ProperLine line({{c, box_.lo.y - 1}, {c, box_.hi.y + 1}});
        return synthesized_.emplace(label, std::move(line)).first->second;
    }
    throw InputError("unknown leaf '" + label + "'");
}

void FoliationChart::add_leaf(std::string label, ProperLine line) {
    validate_leaf(label, line);
    for (const auto& [l, other] : leaves_) {
        if (l == label) throw InputError("duplicate leaf label '" + label + "'");
        if (other.intersects(line)) throw InputError("leaves '" + l + "' and '" + label + "' intersect");
    }
    leaves_.emplace_back(std::move(label), std::move(line));
}

// ---------------------------------------------------------------- TransversePath

Vec2 TransversePath::point_at(double t) const {
    t = std::clamp(t, 0.0, length());
    const auto i = std::min(static_cast<std::size_t>(std::floor(t)), vertices.size() - 2);
    return vertices[i] + (t - static_cast<double>(i)) * (vertices[i + 1] - vertices[i]);
}

std::vector<std::string> TransversePath::leaf_sequence() const {
    std::vector<std::string> out{start_leaf};
    for (const auto& c : crossings) out.push_back(c.leaf);
    out.push_back(end_leaf);
    return out;
}

TransversePath TransversePath::translated(Vec2 v, const std::map<std::string, std::string>& relabel) const {
    auto map_label = [&](const std::string& l) {
        auto it = relabel.find(l);
        return it == relabel.end() ? l : it->second;
    };
    TransversePath out = *this;
    for (auto& p : out.vertices) p += v;
    out.start_leaf = map_label(start_leaf);
    out.end_leaf = map_label(end_leaf);
    for (auto& c : out.crossings) c.leaf = map_label(c.leaf);
    return out;
}

namespace {

constexpr double kParamTolerance = 1e-9;

// Points just before and just after parameter t along the path.
std::pair<Vec2, Vec2> straddle(const TransversePath& path, double t) {
    const double delta = 1e-6;
    return {path.point_at(t - delta), path.point_at(t + delta)};
}

void check_crossing(const TransversePath& path, const Crossing& c, const ProperLine& leaf) {
    auto [before, after] = straddle(path, c.t);
    const Side sb = side_of(leaf, before), sa = side_of(leaf, after);
    if (sb != Side::left || sa != Side::right) {
        std::ostringstream os;
        os << "path does not cross leaf '" << c.leaf << "' from left to right at t=" << c.t << " (" << to_string(sb)
           << " -> " << to_string(sa) << ")";
        throw InputError(os.str());
    }
}

void check_endpoints(const TransversePath& path, const FoliationChart& chart) {
    const ProperLine& start = chart.leaf(path.start_leaf);
    const ProperLine& end = chart.leaf(path.end_leaf);
    if (start.distance(path.vertices.front()) > kSideTolerance)
        throw InputError("path does not start on leaf '" + path.start_leaf + "'");
    if (end.distance(path.vertices.back()) > kSideTolerance)
        throw InputError("path does not end on leaf '" + path.end_leaf + "'");
    if (side_of(start, path.point_at(1e-6)) != Side::right)
        throw InputError("path does not leave '" + path.start_leaf + "' into its right side");
    if (side_of(end, path.point_at(path.length() - 1e-6)) != Side::left)
        throw InputError("path does not reach '" + path.end_leaf + "' from its left side");
}

}  // namespace

TransversePath make_transverse_path(std::vector<Vec2> vertices, std::string start_leaf, std::string end_leaf,
                                    const FoliationChart& chart,
                                    const std::optional<std::vector<std::string>>& expected_labels) {
    if (vertices.size() < 2) throw InputError("transverse path needs at least 2 vertices");
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        if (dist(vertices[i], vertices[i + 1]) == 0) throw InputError("transverse path has repeated vertices");
    TransversePath path{std::move(vertices), std::move(start_leaf), std::move(end_leaf), {}, {}};
    check_endpoints(path, chart);

    std::vector<Crossing> found;
    for (const auto& [label, leaf] : chart.leaves()) {
        std::vector<double> ts;
        for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
            for (double s : segment_line_hits(path.vertices[i], path.vertices[i + 1], leaf))
                ts.push_back(static_cast<double>(i) + s);
        std::sort(ts.begin(), ts.end());
        double last = -kInf;
        for (double t : ts) {
            if (label == path.start_leaf && t <= kParamTolerance) continue;
            if (label == path.end_leaf && t >= path.length() - kParamTolerance) continue;
            if (t - last <= kParamTolerance) continue;
            last = t;
            found.push_back({label, t});
        }
    }
    std::stable_sort(found.begin(), found.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    for (const auto& c : found) check_crossing(path, c, chart.leaf(c.leaf));
    path.crossings = std::move(found);

    if (expected_labels) {
        std::vector<std::string> got;
        for (const auto& c : path.crossings) got.push_back(c.leaf);
        if (got != *expected_labels) {
            std::string msg = "crossing record mismatch: computed [";
            for (std::size_t i = 0; i < got.size(); ++i) msg += (i ? ", " : "") + got[i];
            throw InputError(msg + "]");
        }
    }
    return path;
}

void validate_transverse_path(const TransversePath& path, const FoliationChart& chart) {
    if (path.vertices.size() < 2) throw InputError("transverse path needs at least 2 vertices");
    check_endpoints(path, chart);
    for (std::size_t i = 0; i < path.crossings.size(); ++i) {
        const auto& c = path.crossings[i];
        if (!(c.t > 0 && c.t < path.length())) throw InputError("crossing parameter out of range");
        if (i > 0 && !(c.t > path.crossings[i - 1].t)) throw InputError("crossings are not in increasing order");
        check_crossing(path, c, chart.leaf(c.leaf));
    }
    if (!path.slides.empty()) return;
    const auto fresh = make_transverse_path(path.vertices, path.start_leaf, path.end_leaf, chart);
    if (fresh.crossings.size() != path.crossings.size())
        throw InputError("crossing record does not match the chart");
    for (std::size_t i = 0; i < fresh.crossings.size(); ++i)
        if (fresh.crossings[i].leaf != path.crossings[i].leaf ||
            std::abs(fresh.crossings[i].t - path.crossings[i].t) > 1e-6)
            throw InputError("crossing record does not match the chart");
}

// ---------------------------------------------------------------- Brouwer lines

BrouwerCheck is_brouwer_line(const ProperLine& line, const PlanarMap& f, const Box& box, int grid) {
    if (grid < 1) throw InputError("grid must be positive");
    std::vector<Vec2> samples;
    const Vec2 size = box.hi - box.lo;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const Vec2 z = box.lo + Vec2{(i + 0.5) / grid * size.x, (j + 0.5) / grid * size.y};
            if (side_of(line, z) != Side::left) samples.push_back(z);
        }
    for (const auto& run : line.clipped(box)) {
        const auto dense = densify(run, box.diameter() / 2000);
        samples.insert(samples.end(), dense.begin(), dense.end());
    }
    std::vector<double> margins(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) { margins[i] = signed_distance(line, f(samples[i])); });

    BrouwerCheck out;
    out.samples = samples.size();
    out.margin = kInf;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (margins[i] < out.margin) {
            out.margin = margins[i];
            out.worst_sample = samples[i];
        }
    if (samples.empty()) {
        out.verdict = Verdict::inconclusive;
        return out;
    }
    if (out.margin > kSideTolerance)
        out.verdict = Verdict::yes;
    else if (out.margin > 0)
        out.verdict = Verdict::inconclusive;
    else
        out.verdict = Verdict::no;
    return out;
}

// ---------------------------------------------------------------- above

namespace {

struct Arc {
    std::vector<Vec2> points;
    double t = 0;  // parameter on phi of the landing point
};

// Hit parameters of segment [a, b] against `line`, excluding the allowed end.
bool segment_clear(Vec2 a, Vec2 b, const ProperLine& line, bool allow_start, bool allow_end) {
    const double len = dist(a, b);
    if (len == 0) return false;
    const double tol = 1e-9 / len;
    for (double s : segment_line_hits(a, b, line)) {
        if (allow_start && s <= tol) continue;
        if (allow_end && s >= 1 - tol) continue;
        return false;
    }
    return true;
}

// Arcs from phi_i to phi that avoid all three lines away from their ends.
std::vector<Arc> witness_arcs(const ProperLine& from, const ProperLine& phi, const ProperLine& other, const Box& box) {
    const auto starts = sample_line(from, box, 24);
    const auto ends = sample_line(phi, box, 24);
    std::vector<Arc> arcs;
    for (const auto& p : starts) {
        for (const auto& q : ends) {
            if (segment_clear(p.point, q.point, from, true, false) && segment_clear(p.point, q.point, phi, false, true) &&
                segment_clear(p.point, q.point, other, false, false)) {
                arcs.push_back({{p.point, q.point}, q.param});
                continue;
            }
            for (const Vec2& c : box.corners()) {
                if (dist(c, p.point) == 0 || dist(c, q.point) == 0) continue;
                if (segment_clear(p.point, c, from, true, false) && segment_clear(p.point, c, phi, false, false) &&
                    segment_clear(p.point, c, other, false, false) && segment_clear(c, q.point, from, false, false) &&
                    segment_clear(c, q.point, phi, false, true) && segment_clear(c, q.point, other, false, false)) {
                    arcs.push_back({{p.point, c, q.point}, q.param});
                    break;
                }
            }
        }
    }
    return arcs;
}

bool arcs_disjoint(const Arc& a, const Arc& b) {
    for (std::size_t i = 0; i + 1 < a.points.size(); ++i)
        for (std::size_t j = 0; j + 1 < b.points.size(); ++j)
            if (geom::segments_intersect(a.points[i], a.points[i + 1], b.points[j], b.points[j + 1])) return false;
    return true;
}

Side side_of_line(const ProperLine& of, const ProperLine& wrt) {
    // Lines are disjoint here, so any vertex decides.
    return side_of(wrt, of.vertices().front());
}

}  // namespace

AboveWitness above_witness(const ProperLine& phi2, const ProperLine& phi1, const ProperLine& phi, const Box& box) {
    if (phi.intersects(phi1)) throw PreconditionError("precondition failed: phi and phi1 intersect");
    if (phi.intersects(phi2)) throw PreconditionError("precondition failed: phi and phi2 intersect");
    if (phi1.intersects(phi2)) throw PreconditionError("precondition failed: phi1 and phi2 intersect");
    if (side_of_line(phi1, phi) != side_of_line(phi2, phi))
        throw PreconditionError("precondition failed: phi separates phi1 and phi2");
    if (side_of_line(phi, phi1) != side_of_line(phi2, phi1))
        throw PreconditionError("precondition failed: phi1 separates phi and phi2");
    if (side_of_line(phi, phi2) != side_of_line(phi1, phi2))
        throw PreconditionError("precondition failed: phi2 separates phi and phi1");

    const auto arcs1 = witness_arcs(phi1, phi, phi2, box);
    const auto arcs2 = witness_arcs(phi2, phi, phi1, box);
    AboveWitness out;
    std::size_t up = 0, down = 0;
    bool have = false;
    for (const auto& a1 : arcs1) {
        for (const auto& a2 : arcs2) {
            if (!arcs_disjoint(a1, a2)) continue;
            (a2.t > a1.t ? up : down) += 1;
            if (!have) {
                have = true;
                out.arc1 = a1.points;
                out.arc2 = a2.points;
                out.t1 = a1.t;
                out.t2 = a2.t;
            }
        }
    }
    if (up == 0 && down == 0)
        throw WitnessNotFound("witness-not-found: no disjoint pair among straight and corner arcs");
    if (up > 0 && down > 0) throw DeductionError("witness pairs disagree on the order along phi");
    out.above = up > 0;
    out.disjoint_pairs = up + down;
    return out;
}

bool is_above(const ProperLine& phi2, const ProperLine& phi1, const ProperLine& phi, const Box& box) {
    return above_witness(phi2, phi1, phi, box).above;
}

// ---------------------------------------------------------------- transverse intersection

namespace {

// Positive interleaving for (first, second) at leaf phi.
bool interleaved(const TransversePath& first, const TransversePath& second, const ProperLine& phi,
                 const FoliationChart& chart) {
    const auto& a1 = chart.leaf(first.start_leaf);
    const auto& a2 = chart.leaf(second.start_leaf);
    const auto& b1 = chart.leaf(first.end_leaf);
    const auto& b2 = chart.leaf(second.end_leaf);
    return is_above(a2, a1, phi, chart.box()) && is_above(b1, b2, phi, chart.box());
}

}  // namespace

std::optional<TransverseIntersection> find_transverse_intersection(const TransversePath& gamma1,
                                                                   const TransversePath& gamma2,
                                                                   const FoliationChart& chart) {
    if (gamma1.start_leaf == gamma2.start_leaf || gamma1.end_leaf == gamma2.end_leaf) return std::nullopt;
    for (const auto& c1 : gamma1.crossings) {
        for (const auto& c2 : gamma2.crossings) {
            if (c1.leaf != c2.leaf) continue;
            const std::string& label = c1.leaf;
            if (label == gamma1.start_leaf || label == gamma2.start_leaf || label == gamma1.end_leaf ||
                label == gamma2.end_leaf)
                continue;
            const ProperLine& phi = chart.leaf(label);
            try {
                bool swapped = false;
                bool hit = interleaved(gamma1, gamma2, phi, chart);
                if (!hit) {
                    hit = interleaved(gamma2, gamma1, phi, chart);
                    swapped = hit;
                }
                if (hit)
                    return TransverseIntersection{label, c1.t, c2.t, gamma1.point_at(c1.t), gamma2.point_at(c2.t),
                                                  swapped};
            } catch (const WitnessNotFound&) {
                continue;
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- admissibility

Verdict is_admissible_geometric(const TransversePath& gamma, int n, const PlanarMap& f, const FoliationChart& chart,
                                double max_segment) {
    if (n < 1) throw InputError("order must be at least 1");
    if (!(max_segment > 0)) throw InputError("max_segment must be positive");
    const Box& box = chart.box();
    const auto targets = chart.leaf(gamma.end_leaf).clipped(box);
    bool escaped = false;
    for (const auto& run : chart.leaf(gamma.start_leaf).clipped(box)) {
        auto image = densify(run, max_segment);
        for (auto& p : image) {
            p = f.iterate(p, n);
            if (!box.contains(p)) escaped = true;
        }
        for (std::size_t i = 0; i + 1 < image.size(); ++i) {
            const Vec2 a = image[i], b = image[i + 1];
            for (const auto& target : targets)
                for (std::size_t j = 0; j + 1 < target.size(); ++j) {
                    const Vec2 c = target[j], d = target[j + 1];
                    if (std::max(a.x, b.x) < std::min(c.x, d.x) - 1e-12 ||
                        std::min(a.x, b.x) > std::max(c.x, d.x) + 1e-12 ||
                        std::max(a.y, b.y) < std::min(c.y, d.y) - 1e-12 ||
                        std::min(a.y, b.y) > std::max(c.y, d.y) + 1e-12)
                        continue;
                    if (auto s = geom::segment_intersection_param(a, b, c, d)) {
                        if (box.contains(a + *s * (b - a), 1e-12)) return Verdict::yes;
                    }
                }
        }
    }
    return escaped ? Verdict::inconclusive : Verdict::no;
}

// ---------------------------------------------------------------- forcing

namespace {

// Restriction of a path to [from, to] with a map from old to new parameters.
struct SubPath {
    std::vector<Vec2> vertices;
    std::vector<double> knots;  // old parameter of each new vertex

    double remap(double t) const {
        for (std::size_t j = 0; j + 1 < knots.size(); ++j)
            if (t <= knots[j + 1] || j + 2 == knots.size()) {
                const double span = knots[j + 1] - knots[j];
                return static_cast<double>(j) + (span > 0 ? (t - knots[j]) / span : 0.0);
            }
        return 0;
    }
};

SubPath restrict_path(const TransversePath& path, double from, double to) {
    SubPath out;
    out.vertices.push_back(path.point_at(from));
    out.knots.push_back(from);
    for (std::size_t i = 0; i < path.vertices.size(); ++i) {
        const double t = static_cast<double>(i);
        if (t > from + kParamTolerance && t < to - kParamTolerance) {
            out.vertices.push_back(path.vertices[i]);
            out.knots.push_back(t);
        }
    }
    out.vertices.push_back(path.point_at(to));
    out.knots.push_back(to);
    return out;
}

const Crossing* crossing_at(const TransversePath& path, const std::string& leaf, double t) {
    for (const auto& c : path.crossings)
        if (c.leaf == leaf && std::abs(c.t - t) <= 1e-9) return &c;
    return nullptr;
}

}  // namespace

TransversePath concatenate(const TransversePath& first, double t1, const TransversePath& second, double t2,
                           const FoliationChart& chart, const std::string& leaf) {
    if (!crossing_at(first, leaf, t1) || !crossing_at(second, leaf, t2))
        throw InputError("intersection data does not match the crossing records");
    const SubPath head = restrict_path(first, 0, t1);
    const SubPath tail = restrict_path(second, t2, second.length());

    TransversePath out;
    out.start_leaf = first.start_leaf;
    out.end_leaf = second.end_leaf;
    out.vertices = head.vertices;
    const double joint = static_cast<double>(head.vertices.size() - 1);

    for (const auto& c : first.crossings)
        if (c.t < t1 - kParamTolerance) out.crossings.push_back({c.leaf, head.remap(c.t)});
    for (const auto& [a, b] : first.slides)
        if (a < t1) out.slides.emplace_back(head.remap(a), head.remap(std::min(b, t1)));
    out.crossings.push_back({leaf, joint});

    const Vec2 p1 = first.point_at(t1), p2 = second.point_at(t2);
    if (dist(p1, p2) > kOnTolerance) {
        // Slide along the common leaf between the two crossing points.
        const ProperLine& line = chart.leaf(leaf);
        const double u1 = line.parameter(p1), u2 = line.parameter(p2);
        const double lo = std::min(u1, u2), hi = std::max(u1, u2);
        std::vector<std::pair<double, Vec2>> inner;
        double acc = 0;
        const auto& vs = line.vertices();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (i > 0) acc += dist(vs[i - 1], vs[i]);
            if (acc > lo + kParamTolerance && acc < hi - kParamTolerance) inner.emplace_back(acc, vs[i]);
        }
        if (u2 < u1) std::reverse(inner.begin(), inner.end());
        for (const auto& [u, v] : inner) out.vertices.push_back(v);
        out.vertices.push_back(p2);
        out.slides.emplace_back(joint, static_cast<double>(out.vertices.size() - 1));
    }
    const double offset = static_cast<double>(out.vertices.size() - 1);
    out.vertices.insert(out.vertices.end(), tail.vertices.begin() + 1, tail.vertices.end());
    for (const auto& c : second.crossings)
        if (c.t > t2 + kParamTolerance) out.crossings.push_back({c.leaf, offset + tail.remap(c.t)});
    for (const auto& [a, b] : second.slides)
        if (b > t2) out.slides.emplace_back(offset + tail.remap(std::max(a, t2)), offset + tail.remap(b));
    return out;
}

std::vector<AdmissibilityFact> forcing_step(const AdmissibilityFact& f1, const AdmissibilityFact& f2,
                                            const TransverseIntersection& x, const FoliationChart& chart) {
    if (f1.order < 1 || f2.order < 1) throw InputError("orders must be at least 1");
    if (dist(f1.path.point_at(x.t1), x.point1) > 1e-9 || dist(f2.path.point_at(x.t2), x.point2) > 1e-9)
        throw InputError("intersection points do not lie on the paths");
    const int total = f1.order + f2.order;
    Provenance prov{Provenance::Kind::forcing_step, f1.id, f2.id, x};
    Disjunction dis{std::max(f1.order, f2.order), std::min(f1.order, f2.order), {0, 1}};

    std::vector<AdmissibilityFact> out;
    out.push_back({0, concatenate(f1.path, x.t1, f2.path, x.t2, chart, x.leaf), total, prov, dis});
    out.push_back({0, concatenate(f2.path, x.t2, f1.path, x.t1, chart, x.leaf), total, prov, dis});
    return out;
}

// ---------------------------------------------------------------- FactBase

std::optional<std::size_t> FactBase::find(const TransversePath& path, int order) const {
    const auto key = path.leaf_sequence();
    for (const auto& f : facts_)
        if (f.order == order && f.path.leaf_sequence() == key) return f.id;
    return std::nullopt;
}

std::size_t FactBase::insert(AdmissibilityFact fact) {
    if (fact.order < 1) throw InputError("order must be at least 1");
    if (auto id = find(fact.path, fact.order)) return *id;
    fact.id = facts_.size();
    facts_.push_back(std::move(fact));
    return facts_.back().id;
}

std::size_t FactBase::add_given(TransversePath path, int order) {
    return insert({0, std::move(path), order, Provenance{}, std::nullopt});
}

std::size_t FactBase::add_checked(TransversePath path, int order) {
    return insert({0, std::move(path), order, Provenance{Provenance::Kind::geometric_check, 0, 0, std::nullopt},
                   std::nullopt});
}

std::size_t FactBase::derive(std::size_t max_facts) {
    const std::size_t before = facts_.size();
    std::set<std::pair<std::size_t, std::size_t>> done;
    bool changed = true;
    while (changed && facts_.size() < max_facts) {
        changed = false;
        for (std::size_t i = 0; i < facts_.size() && facts_.size() < max_facts; ++i) {
            for (std::size_t j = i + 1; j < facts_.size() && facts_.size() < max_facts; ++j) {
                if (!done.insert({i, j}).second) continue;
                std::optional<TransverseIntersection> x;
                try {
                    x = find_transverse_intersection(facts_[i].path, facts_[j].path, chart_);
                } catch (const Error& e) {
                    skipped_.push_back({i, j, e.what()});
                    continue;
                }
                if (!x) continue;
                auto step = forcing_step(facts_[i], facts_[j], *x, chart_);
                std::array<std::size_t, 2> ids{};
                const std::size_t size_before = facts_.size();
                for (std::size_t k = 0; k < 2; ++k) {
                    if (facts_.size() >= max_facts && !find(step[k].path, step[k].order)) {
                        ids[k] = facts_.size() + k;  // not stored
                        continue;
                    }
                    ids[k] = insert(step[k]);
                }
                for (std::size_t k = 0; k < 2; ++k)
                    if (ids[k] >= size_before && ids[k] < facts_.size()) facts_[ids[k]].disjunction->facts = ids;
                if (facts_.size() > size_before) changed = true;
            }
        }
    }
    return facts_.size() - before;
}

// ---------------------------------------------------------------- horseshoe

double horseshoe_entropy_bound(int q) {
    if (q < 2) throw InputError("horseshoe certificate needs q >= 2");
    return std::log(4.0) / (3.0 * q);
}

std::optional<HorseshoeCertificate> horseshoe_certificate(const TransversePath& gamma, int q,
                                                          std::array<std::int64_t, 2> deck,
                                                          const FoliationChart& chart) {
    const double bound = horseshoe_entropy_bound(q);
    if (deck[0] == 0 && deck[1] == 0) throw InputError("deck translation must be nonzero");
    const Vec2 shift{static_cast<double>(deck[0]), static_cast<double>(deck[1])};

    FoliationChart extended = chart;
    std::map<std::string, std::string> relabel;
    for (const auto& label : gamma.leaf_sequence()) {
        if (relabel.count(label)) continue;
        const ProperLine moved = chart.leaf(label).translated(shift);
        std::string found;
        for (const auto& [l, line] : extended.leaves()) {
            if (line.vertices().size() != moved.vertices().size()) continue;
            bool same = true;
            for (std::size_t i = 0; i < moved.vertices().size() && same; ++i)
                same = dist(line.vertices()[i], moved.vertices()[i]) <= 1e-9;
            if (same) {
                found = l;
                break;
            }
        }
        if (found.empty()) {
            found = label + "+(" + std::to_string(deck[0]) + "," + std::to_string(deck[1]) + ")";
            extended.add_leaf(found, moved);
        }
        relabel[label] = found;
    }
    const TransversePath moved = gamma.translated(shift, relabel);
    auto x = find_transverse_intersection(gamma, moved, extended);
    if (!x) return std::nullopt;
    return HorseshoeCertificate{*x, deck, q, bound, relabel};
}

}  // namespace forcekit::plane
