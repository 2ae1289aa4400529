#pragma once

// Planar side of the forcing theory: oriented proper lines, Brouwer lines,
// transverse paths, the "above relative to" order, F-transverse
// intersections and the deduction calculus over admissibility facts.

#include "forcekit/error.hpp"
#include "forcekit/geometry.hpp"
#include "forcekit/profile.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace forcekit::plane {

using geom::Box;
using geom::Vec2;

enum class Side { left, right, on };
enum class Verdict { no, yes, inconclusive };

std::string to_string(Side s);
std::string to_string(Verdict v);

// Co-orientation convention, fixed here and nowhere else: R(line) is the
// component to the right of the direction of travel.
inline constexpr Side kPositiveSide = Side::right;

inline constexpr double kSideTolerance = 1e-9;
inline constexpr double kOnTolerance = 1e-12;

// Oriented PL line: a vertex chain whose first and last segments continue as
// rays to infinity.
class ProperLine {
public:
    explicit ProperLine(std::vector<Vec2> vertices);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    // Unit direction of the ray leaving the first vertex (away from the chain).
    Vec2 tail_direction() const;
    // Unit direction of the ray leaving the last vertex.
    Vec2 head_direction() const;

    // A piece is a segment (length finite) or a ray (length infinite).
    struct Piece {
        Vec2 origin;
        Vec2 direction;  // segment: b - a; ray: unit direction
        bool ray = false;
        double param0 = 0;  // line parameter at origin
        double sign = 1;    // d(param)/d(s) along the piece
    };
    std::vector<Piece> pieces() const;

    double distance(Vec2 p) const;
    // Arc-length parameter of the closest point, increasing with the
    // orientation: negative along the tail ray, beyond the chain length on
    // the head ray.
    double parameter(Vec2 p) const;
    Vec2 point_at(double t) const;
    double chain_length() const { return length_; }

    // Portions of the line inside the box, as polylines in travel order.
    std::vector<std::vector<Vec2>> clipped(const Box& box) const;

    bool is_simple() const;
    bool intersects(const ProperLine& other) const;

    ProperLine reversed() const;
    ProperLine translated(Vec2 v) const;

private:
    std::vector<Vec2> vertices_;
    double length_ = 0;
};

Side side_of(const ProperLine& line, Vec2 z);
// Distance to the line, positive on R(line), negative on L(line), 0 when On.
double signed_distance(const ProperLine& line, Vec2 z);

// Orientation-preserving homeomorphism of the plane given as a composition
// of closed-form primitives (first entry acts first).
struct Translation {
    Vec2 v;
};
struct LinearMap {
    double a = 1, b = 0, c = 0, d = 1;
};
struct HorizontalShear {
    Profile profile = Profile::sine;
    double amplitude = 0;
};
struct VerticalShear {
    Profile profile = Profile::sine;
    double amplitude = 0;
};
using MapPrimitive = std::variant<Translation, LinearMap, HorizontalShear, VerticalShear>;

class PlanarMap {
public:
    PlanarMap() = default;
    explicit PlanarMap(std::vector<MapPrimitive> composition);

    Vec2 operator()(Vec2 z) const;
    Vec2 inverse(Vec2 z) const;
    Vec2 iterate(Vec2 z, int n) const;
    const std::vector<MapPrimitive>& composition() const { return composition_; }

private:
    std::vector<MapPrimitive> composition_;
};

// Finite set of labelled, pairwise disjoint leaves inside a bounding box.
// With the vertical model, any label "x=<c>" names the upward vertical line
// through c even when it is not stored.
class FoliationChart {
public:
    FoliationChart(Box box, std::vector<std::pair<std::string, ProperLine>> leaves, bool vertical_model = false);

    const Box& box() const { return box_; }
    bool vertical_model() const { return vertical_; }
    const std::vector<std::pair<std::string, ProperLine>>& leaves() const { return leaves_; }
    bool contains(const std::string& label) const;
    const ProperLine& leaf(const std::string& label) const;

    // Adds a leaf and revalidates; throws InputError on conflicts.
    void add_leaf(std::string label, ProperLine line);

private:
    void validate() const;
    void validate_leaf(const std::string& label, const ProperLine& line) const;

    Box box_;
    std::vector<std::pair<std::string, ProperLine>> leaves_;
    bool vertical_ = false;
    mutable std::map<std::string, ProperLine> synthesized_;
};

struct Crossing {
    std::string leaf;
    double t = 0;
    friend bool operator==(const Crossing&, const Crossing&) = default;
};

// PL path parametrised by vertex index (vertex i sits at t = i). It starts on
// start_leaf, ends on end_leaf and records the leaves crossed in between.
// slides are parameter ranges where a spliced path runs along a leaf; they
// only appear in concatenations and stand for zero length in leaf space.
struct TransversePath {
    std::vector<Vec2> vertices;
    std::string start_leaf;
    std::string end_leaf;
    std::vector<Crossing> crossings;
    std::vector<std::pair<double, double>> slides;

    double length() const { return static_cast<double>(vertices.size()) - 1; }
    Vec2 point_at(double t) const;
    // Leaf labels met in order: start, crossings..., end.
    std::vector<std::string> leaf_sequence() const;
    TransversePath translated(Vec2 v, const std::map<std::string, std::string>& relabel) const;
};

// Computes the crossing record of a PL path against every leaf of the chart
// and checks positive transversality. expected_labels, when given, must match
// the computed crossing labels. Throws InputError with the failing condition.
TransversePath make_transverse_path(std::vector<Vec2> vertices, std::string start_leaf, std::string end_leaf,
                                    const FoliationChart& chart,
                                    const std::optional<std::vector<std::string>>& expected_labels = {});

// Re-checks an existing record: every crossing changes side from L to R.
void validate_transverse_path(const TransversePath& path, const FoliationChart& chart);

struct BrouwerCheck {
    Verdict verdict = Verdict::no;
    double margin = 0;  // worst signed distance of an image sample
    Vec2 worst_sample;
    std::size_t samples = 0;
};

// Samples closure(R(line)) inside the box on a grid plus the line itself and
// checks that every image lies in R(line) with margin > kSideTolerance.
BrouwerCheck is_brouwer_line(const ProperLine& line, const PlanarMap& f, const Box& box, int grid = 64);

class PreconditionError : public DeductionError {
public:
    using DeductionError::DeductionError;
};

class WitnessNotFound : public DeductionError {
public:
    using DeductionError::DeductionError;
};

struct AboveWitness {
    bool above = false;
    std::size_t disjoint_pairs = 0;
    // One disjoint witness pair: arcs from phi1 and phi2 to phi.
    std::vector<Vec2> arc1, arc2;
    double t1 = 0, t2 = 0;
};

// Whether phi2 is above phi1 relative to phi. Witness arcs are straight
// segments or two-segment arcs through a box corner; arcs stay off the three
// lines except at their endpoints.
AboveWitness above_witness(const ProperLine& phi2, const ProperLine& phi1, const ProperLine& phi, const Box& box);
bool is_above(const ProperLine& phi2, const ProperLine& phi1, const ProperLine& phi, const Box& box);

struct TransverseIntersection {
    std::string leaf;
    double t1 = 0;
    double t2 = 0;
    Vec2 point1;  // gamma1(t1)
    Vec2 point2;  // gamma2(t2)
    // The positive interleaving holds with the roles of the paths exchanged.
    bool swapped = false;
};

std::optional<TransverseIntersection> find_transverse_intersection(const TransversePath& gamma1,
                                                                   const TransversePath& gamma2,
                                                                   const FoliationChart& chart);

// f^n(start leaf) meets end leaf inside the box; inconclusive when the image
// leaves the box without meeting it.
Verdict is_admissible_geometric(const TransversePath& gamma, int n, const PlanarMap& f, const FoliationChart& chart,
                                double max_segment = 1e-3);

struct Provenance {
    enum class Kind { given, geometric_check, forcing_step };
    Kind kind = Kind::given;
    std::size_t parent1 = 0;
    std::size_t parent2 = 0;
    std::optional<TransverseIntersection> via;
};
std::string to_string(Provenance::Kind k);

// Unresolved refinement of a forcing step: both spliced paths are admissible
// of order max_order, or at least one of them is of order min_order.
struct Disjunction {
    int max_order = 0;
    int min_order = 0;
    std::array<std::size_t, 2> facts{0, 0};  // ids once stored in a FactBase
};

struct AdmissibilityFact {
    std::size_t id = 0;
    TransversePath path;
    int order = 1;
    Provenance provenance;
    std::optional<Disjunction> disjunction;
};

// Splice gamma1|[a1,t1] . gamma2|[t2,b2]. When the two crossing points on the
// common leaf differ, the splice slides along the leaf between them.
TransversePath concatenate(const TransversePath& first, double t1, const TransversePath& second, double t2,
                           const FoliationChart& chart, const std::string& leaf);

// Both splices at order n1 + n2, each tagged with the max/min disjunction.
std::vector<AdmissibilityFact> forcing_step(const AdmissibilityFact& f1, const AdmissibilityFact& f2,
                                            const TransverseIntersection& x, const FoliationChart& chart);

// Insertion-ordered fact store with provenance and closure under forcing_step.
class FactBase {
public:
    explicit FactBase(FoliationChart chart) : chart_(std::move(chart)) {}

    const FoliationChart& chart() const { return chart_; }
    const std::vector<AdmissibilityFact>& facts() const { return facts_; }

    // Returns the id of the stored (or already present) fact.
    std::size_t add_given(TransversePath path, int order);
    std::size_t add_checked(TransversePath path, int order);

    struct Skipped {
        std::size_t first = 0, second = 0;
        std::string reason;
    };
    // Applies forcing_step to every ordered pair with a transverse
    // intersection until no new fact appears or the store holds max_facts.
    // Returns the number of new facts.
    std::size_t derive(std::size_t max_facts);
    const std::vector<Skipped>& skipped() const { return skipped_; }

private:
    std::size_t insert(AdmissibilityFact fact);
    std::optional<std::size_t> find(const TransversePath& path, int order) const;

    FoliationChart chart_;
    std::vector<AdmissibilityFact> facts_;
    std::vector<Skipped> skipped_;
};

struct HorseshoeCertificate {
    TransverseIntersection intersection;
    std::array<std::int64_t, 2> deck{0, 0};
    int q = 2;
    double entropy_bound = 0;  // log(4) / (3q)
    std::map<std::string, std::string> translated_leaves;
};

double horseshoe_entropy_bound(int q);

// Looks for an F-transverse intersection between gamma and its deck
// translate T gamma. The chart is extended with translated leaves; a
// translate that coincides with a stored leaf reuses its label.
std::optional<HorseshoeCertificate> horseshoe_certificate(const TransversePath& gamma, int q,
                                                          std::array<std::int64_t, 2> deck,
                                                          const FoliationChart& chart);

}  // namespace forcekit::plane
