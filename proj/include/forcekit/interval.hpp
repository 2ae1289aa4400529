#pragma once

// One-dimensional forcing: covering graphs of piecewise-linear interval maps
// and exact periodic orbits certified from itineraries.

#include "forcekit/error.hpp"
#include "forcekit/rational.hpp"
#include "forcekit/symbolic.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace forcekit::interval {

struct ClosedInterval {
    Rational lo;
    Rational hi;

    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains(const ClosedInterval& other) const { return lo <= other.lo && other.hi <= hi; }
    friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

// Continuous map given by exact breakpoints with strictly increasing x,
// linear in between.
class PLMap {
public:
    struct Breakpoint {
        Rational x;
        Rational y;
    };

    explicit PLMap(std::vector<Breakpoint> breakpoints);
    static PLMap identity(const Rational& lo, const Rational& hi);

    const std::vector<Breakpoint>& breakpoints() const { return points_; }
    ClosedInterval domain() const { return {points_.front().x, points_.back().x}; }

    // Throws InputError outside the domain.
    Rational operator()(const Rational& x) const;
    // Index of the linear piece containing x (rightmost piece at shared
    // breakpoints except the last one).
    std::size_t piece(const Rational& x) const;

private:
    std::vector<Breakpoint> points_;
};

// Ordered endpoints a0 < a1 < ... < ak; interval j is (a_j, a_{j+1}).
class IntervalPartition {
public:
    explicit IntervalPartition(std::vector<Rational> endpoints);

    std::size_t size() const { return endpoints_.size() - 1; }
    const std::vector<Rational>& endpoints() const { return endpoints_; }
    ClosedInterval closure(std::size_t j) const { return {endpoints_.at(j), endpoints_.at(j + 1)}; }
    bool is_endpoint(const Rational& x) const;

private:
    std::vector<Rational> endpoints_;
};

// Exact [min, max] of f over the closed interval.
ClosedInterval image_bounds(const PLMap& f, const ClosedInterval& interval);

struct CoveringGraph {
    std::size_t nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // sorted

    bool has_edge(std::size_t from, std::size_t to) const;
    // 0/1 adjacency matrix; node j is labelled "j".
    symbolic::TransitionMatrix adjacency() const;
};

CoveringGraph build_covering_graph(const PLMap& f, const IntervalPartition& partition);

struct PeriodicPoint {
    Rational x;
    std::vector<Rational> orbit;  // x, f(x), ..., f^{T-1}(x)
    std::size_t minimal_period = 0;
    // Some orbit point sits on a partition endpoint instead of inside its
    // interval: the itinerary collapsed onto the boundary.
    bool boundary = false;
};

// Every solution of f^T(x) = x whose orbit follows the itinerary in the
// closed intervals, one per affine branch of f^T on the cylinder (a branch
// with f^T = id contributes its midpoint). Sorted by x. Throws
// DeductionError when the cycle is not admissible in the covering graph.
std::vector<PeriodicPoint> points_from_itinerary(const PLMap& f, const IntervalPartition& partition,
                                                 const symbolic::Word& itinerary);

// Preferred solution: interior orbits before boundary ones, then full minimal
// period, then smallest x.
PeriodicPoint point_from_itinerary(const PLMap& f, const IntervalPartition& partition,
                                   const symbolic::Word& itinerary);

inline constexpr int kMaxForcedPeriod = 20;

struct PeriodCertificate {
    std::size_t period = 0;
    symbolic::Word itinerary;
    PeriodicPoint point;
};

// For each T <= max_period, the first primitive cycle (in spelling order)
// whose exact orbit has minimal period T. Sorted by period.
std::vector<PeriodCertificate> forced_minimal_periods(const CoveringGraph& graph, const PLMap& f,
                                                      const IntervalPartition& partition, int max_period);

std::vector<std::size_t> periods_of(const std::vector<PeriodCertificate>& certificates);

}  // namespace forcekit::interval
