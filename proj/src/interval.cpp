#include "forcekit/interval.hpp"

#include "forcekit/error.hpp"

#include <algorithm>

namespace forcekit::interval {

PLMap::PLMap(std::vector<Breakpoint> breakpoints) : points_(std::move(breakpoints)) {
    if (points_.size() < 2) throw InputError("a PL map needs at least 2 breakpoints");
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
        if (!(points_[i].x < points_[i + 1].x))
            throw InputError("breakpoint x-coordinates must be strictly increasing");
}

PLMap PLMap::identity(const Rational& lo, const Rational& hi) { return PLMap({{lo, lo}, {hi, hi}}); }

std::size_t PLMap::piece(const Rational& x) const {
    if (x < points_.front().x || x > points_.back().x)
        throw InputError("point " + to_string(x) + " outside the map domain");
    const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                     [](const Rational& v, const Breakpoint& b) { return v < b.x; });
    const auto idx = static_cast<std::size_t>(it - points_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, points_.size() - 2);
}

Rational PLMap::operator()(const Rational& x) const {
    const std::size_t k = piece(x);
    const auto& p = points_[k];
    const auto& q = points_[k + 1];
    return p.y + (q.y - p.y) * (x - p.x) / (q.x - p.x);
}

IntervalPartition::IntervalPartition(std::vector<Rational> endpoints) : endpoints_(std::move(endpoints)) {
    if (endpoints_.size() < 2) throw InputError("a partition needs at least 2 endpoints");
    for (std::size_t i = 0; i + 1 < endpoints_.size(); ++i)
        if (!(endpoints_[i] < endpoints_[i + 1]))
            throw InputError("partition endpoints must be strictly increasing");
}

bool IntervalPartition::is_endpoint(const Rational& x) const {
    return std::binary_search(endpoints_.begin(), endpoints_.end(), x);
}

ClosedInterval image_bounds(const PLMap& f, const ClosedInterval& interval) {
    const auto dom = f.domain();
    if (interval.lo > interval.hi) throw InputError("empty interval");
    if (!dom.contains(interval))
        throw InputError("interval [" + to_string(interval.lo) + ", " + to_string(interval.hi) +
                         "] outside the map domain");
    Rational lo = f(interval.lo), hi = lo;
    auto take = [&](const Rational& v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    take(f(interval.hi));
    for (const auto& b : f.breakpoints())
        if (interval.lo < b.x && b.x < interval.hi) take(b.y);
    return {lo, hi};
}

bool CoveringGraph::has_edge(std::size_t from, std::size_t to) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(from, to));
}

symbolic::TransitionMatrix CoveringGraph::adjacency() const {
    std::vector<std::vector<std::int64_t>> rows(nodes, std::vector<std::int64_t>(nodes, 0));
    for (const auto& [i, j] : edges) rows[i][j] = 1;
    return symbolic::TransitionMatrix(std::move(rows));
}

CoveringGraph build_covering_graph(const PLMap& f, const IntervalPartition& partition) {
    CoveringGraph g;
    g.nodes = partition.size();
    for (std::size_t i = 0; i < g.nodes; ++i) {
        const ClosedInterval image = image_bounds(f, partition.closure(i));
        for (std::size_t j = 0; j < g.nodes; ++j)
            if (image.contains(partition.closure(j))) g.edges.emplace_back(i, j);
    }
    return g;
}

namespace {

// x in [lo, hi] on which the orbit has followed the itinerary so far and
// f^j(x) = slope * x + offset.
struct Branch {
    Rational lo, hi;
    Rational slope, offset;
};

// Restricts a branch to {x : slope * x + offset in [lo, hi]}.
bool restrict_to(Branch& b, const ClosedInterval& target) {
    if (b.slope == 0) {
        return target.contains(b.offset);
    }
    Rational u = (target.lo - b.offset) / b.slope;
    Rational v = (target.hi - b.offset) / b.slope;
    if (u > v) std::swap(u, v);
    b.lo = std::max(b.lo, u);
    b.hi = std::min(b.hi, v);
    return b.lo <= b.hi;
}

std::size_t minimal_period_of(const PLMap& f, const Rational& x, std::size_t bound) {
    Rational y = x;
    for (std::size_t d = 1; d <= bound; ++d) {
        y = f(y);
        if (y == x) return d;
    }
    return 0;
}

}  // namespace

std::vector<PeriodicPoint> points_from_itinerary(const PLMap& f, const IntervalPartition& partition,
                                                 const symbolic::Word& itinerary) {
    const auto& w = itinerary.symbols;
    if (w.empty()) throw InputError("itinerary must be non-empty");
    for (const auto s : w)
        if (s >= partition.size()) throw InputError("itinerary symbol out of range");
    const CoveringGraph graph = build_covering_graph(f, partition);
    for (std::size_t j = 0; j < w.size(); ++j)
        if (!graph.has_edge(w[j], w[(j + 1) % w.size()]))
            throw DeductionError("itinerary is not an admissible cycle of the covering graph");

    const std::size_t period = w.size();
    const auto& bps = f.breakpoints();
    const ClosedInterval start = partition.closure(w[0]);
    std::vector<Branch> branches{{start.lo, start.hi, Rational(1), Rational(0)}};
    for (std::size_t j = 0; j < period; ++j) {
        const ClosedInterval next = partition.closure(w[(j + 1) % period]);
        std::vector<Branch> refined;
        for (const Branch& b : branches) {
            for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
                Branch piece = b;
                if (!restrict_to(piece, {bps[k].x, bps[k + 1].x})) continue;
                const Rational m = (bps[k + 1].y - bps[k].y) / (bps[k + 1].x - bps[k].x);
                const Rational c = bps[k].y - m * bps[k].x;
                piece.offset = m * piece.offset + c;
                piece.slope = m * piece.slope;
                if (restrict_to(piece, next)) refined.push_back(piece);
            }
        }
        branches = std::move(refined);
    }

    std::vector<Rational> roots;
    for (const Branch& b : branches) {
        if (b.slope != 1) {
            const Rational x = b.offset / (1 - b.slope);
            if (b.lo <= x && x <= b.hi) roots.push_back(x);
        } else if (b.offset == 0) {
            roots.push_back((b.lo + b.hi) / 2);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

    std::vector<PeriodicPoint> out;
    for (const Rational& x : roots) {
        PeriodicPoint pt;
        pt.x = x;
        Rational y = x;
        bool follows = true;
        for (std::size_t j = 0; j < period; ++j) {
            const ClosedInterval cell = partition.closure(w[j]);
            if (!cell.contains(y)) follows = false;
            if (y == cell.lo || y == cell.hi) pt.boundary = true;
            pt.orbit.push_back(y);
            y = f(y);
        }
        if (!follows || y != x) continue;  // cannot happen for exact branches
        pt.minimal_period = minimal_period_of(f, x, period);
        out.push_back(std::move(pt));
    }
    return out;
}

PeriodicPoint point_from_itinerary(const PLMap& f, const IntervalPartition& partition,
                                   const symbolic::Word& itinerary) {
    auto points = points_from_itinerary(f, partition, itinerary);
    if (points.empty()) throw DeductionError("no periodic point follows the itinerary");
    const std::size_t period = itinerary.symbols.size();
    std::stable_sort(points.begin(), points.end(), [&](const PeriodicPoint& a, const PeriodicPoint& b) {
        if (a.boundary != b.boundary) return !a.boundary;
        const bool fa = a.minimal_period == period, fb = b.minimal_period == period;
        return fa && !fb;
    });
    return points.front();
}

std::vector<PeriodCertificate> forced_minimal_periods(const CoveringGraph& graph, const PLMap& f,
                                                      const IntervalPartition& partition, int max_period) {
    if (max_period > kMaxForcedPeriod)
        throw LimitError("forced period search is limited to max period " + std::to_string(kMaxForcedPeriod));
    if (graph.nodes != partition.size()) throw InputError("graph and partition disagree on node count");
    std::vector<PeriodCertificate> out;
    if (graph.nodes == 0 || max_period < 1) return out;
    const symbolic::TransitionMatrix a = graph.adjacency();
    for (int t = 1; t <= max_period; ++t) {
        const auto period = static_cast<std::size_t>(t);
        for (const auto& cycle : symbolic::periodic_words(a, t)) {
            if (!cycle.primitive()) continue;
            auto points = points_from_itinerary(f, partition, cycle.word());
            std::stable_sort(points.begin(), points.end(),
                             [](const PeriodicPoint& p, const PeriodicPoint& q) { return !p.boundary && q.boundary; });
            const auto hit = std::find_if(points.begin(), points.end(),
                                          [&](const PeriodicPoint& p) { return p.minimal_period == period; });
            if (hit == points.end()) continue;
            out.push_back({period, cycle.word(), *hit});
            break;
        }
    }
    return out;
}

std::vector<std::size_t> periods_of(const std::vector<PeriodCertificate>& certificates) {
    std::vector<std::size_t> out;
    for (const auto& c : certificates) out.push_back(c.period);
    return out;
}

}  // namespace forcekit::interval
