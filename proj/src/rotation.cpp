#include "forcekit/rotation.hpp"

#include "forcekit/error.hpp"
#include "forcekit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace forcekit::rotation {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

Vec2 apply_primitive(const Primitive& prim, Vec2 z) {
    return std::visit(overloaded{
                          [&](const IntegerTranslation& t) {
                              return Vec2{z.x + static_cast<double>(t.dx), z.y + static_cast<double>(t.dy)};
                          },
                          [&](const RealTranslation& t) { return z + t.v; },
                          [&](const HorizontalShear& s) {
                              return Vec2{z.x + s.amplitude * evaluate(s.profile, z.y), z.y};
                          },
                          [&](const VerticalShear& s) {
                              return Vec2{z.x, z.y + s.amplitude * evaluate(s.profile, z.x)};
                          },
                      },
                      prim);
}

Vec2 invert_primitive(const Primitive& prim, Vec2 z) {
    return std::visit(overloaded{
                          [&](const IntegerTranslation& t) {
                              return Vec2{z.x - static_cast<double>(t.dx), z.y - static_cast<double>(t.dy)};
                          },
                          [&](const RealTranslation& t) { return z - t.v; },
                          [&](const HorizontalShear& s) {
                              return Vec2{z.x - s.amplitude * evaluate(s.profile, z.y), z.y};
                          },
                          [&](const VerticalShear& s) {
                              return Vec2{z.x, z.y - s.amplitude * evaluate(s.profile, z.x)};
                          },
                      },
                      prim);
}

UnimodularMatrix multiply(const UnimodularMatrix& m, const UnimodularMatrix& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

Vec2 grid_point(int i, int j, int m) {
    return {static_cast<double>(i) / m, static_cast<double>(j) / m};
}

}  // namespace

UnimodularMatrix UnimodularMatrix::inverse() const {
    const auto dt = det();
    return {d * dt, -b * dt, -c * dt, a * dt};
}

TorusLift::TorusLift(std::vector<Primitive> composition, std::optional<UnimodularMatrix> frame)
    : composition_(std::move(composition)), frame_(frame) {
    if (frame_ && std::abs(frame_->det()) != 1) throw InputError("frame matrix must have determinant +-1");
    for (const auto& p : composition_) {
        const bool finite = std::visit(overloaded{
                                           [](const IntegerTranslation&) { return true; },
                                           [](const RealTranslation& t) { return std::isfinite(t.v.x) && std::isfinite(t.v.y); },
                                           [](const HorizontalShear& s) { return std::isfinite(s.amplitude); },
                                           [](const VerticalShear& s) { return std::isfinite(s.amplitude); },
                                       },
                                       p);
        if (!finite) throw InputError("lift primitives must have finite parameters");
    }
}

TorusLift TorusLift::translation(Vec2 v) { return TorusLift({RealTranslation{v}}); }

Vec2 TorusLift::apply_raw(Vec2 z) const {
    for (const auto& p : composition_) z = apply_primitive(p, z);
    return z;
}

Vec2 TorusLift::inverse_raw(Vec2 z) const {
    for (auto it = composition_.rbegin(); it != composition_.rend(); ++it) z = invert_primitive(*it, z);
    return z;
}

Vec2 TorusLift::operator()(Vec2 z) const {
    if (!frame_) return apply_raw(z);
    return frame_->apply(apply_raw(frame_->inverse().apply(z)));
}

Vec2 TorusLift::inverse(Vec2 z) const {
    if (!frame_) return inverse_raw(z);
    return frame_->apply(inverse_raw(frame_->inverse().apply(z)));
}

Vec2 TorusLift::iterate(Vec2 z, int n) const {
    if (!frame_) {
        for (int i = 0; i < n; ++i) z = apply_raw(z);
        return z;
    }
    z = frame_->inverse().apply(z);
    for (int i = 0; i < n; ++i) z = apply_raw(z);
    return frame_->apply(z);
}

TorusLift TorusLift::power(int k) const {
    if (k < 1) throw InputError("lift powers must be >= 1");
    std::vector<Primitive> comp;
    comp.reserve(composition_.size() * static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comp.insert(comp.end(), composition_.begin(), composition_.end());
    return TorusLift(std::move(comp), frame_);
}

TorusLift TorusLift::then(const TorusLift& after) const {
    if (frame_.has_value() != after.frame_.has_value() ||
        (frame_ && (frame_->a != after.frame_->a || frame_->b != after.frame_->b || frame_->c != after.frame_->c ||
                    frame_->d != after.frame_->d)))
        throw InputError("cannot compose lifts with different frames");
    std::vector<Primitive> comp = composition_;
    comp.insert(comp.end(), after.composition_.begin(), after.composition_.end());
    return TorusLift(std::move(comp), frame_);
}

TorusLift TorusLift::conjugated(const UnimodularMatrix& m) const {
    return TorusLift(composition_, frame_ ? multiply(m, *frame_) : m);
}

double equivariance_defect(const TorusLift& g, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_int_distribution<int> shift(-2, 2);
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        const Vec2 z{coord(rng), coord(rng)};
        const Vec2 v{static_cast<double>(shift(rng)), static_cast<double>(shift(rng))};
        worst = std::max(worst, geom::norm(g(z + v) - g(z) - v));
    }
    return worst;
}

Vec2 displacement(const TorusLift& g, Vec2 z, int n) {
    if (n < 1) throw InputError("iterate count must be >= 1");
    return (g.iterate(z, n) - z) / static_cast<double>(n);
}

RotationPolygon rotation_set_estimate(const TorusLift& g, const Budget& budget) {
    if (budget.grid < 2) throw InputError("grid resolution must be >= 2");
    if (budget.skip < 0 || budget.skip >= budget.steps) throw InputError("need 0 <= N < n");
    const int m = budget.grid;
    // Iterate in the unframed coordinates and map displacements back once.
    const TorusLift raw(g.composition());
    const auto frame = g.frame();
    std::vector<std::vector<Vec2>> row_hulls(static_cast<std::size_t>(m));
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        std::vector<Vec2> points;
        points.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(budget.steps - budget.skip));
        for (int j = 0; j < m; ++j) {
            Vec2 z0 = grid_point(static_cast<int>(i), j, m);
            if (frame) z0 = frame->inverse().apply(z0);
            Vec2 z = z0;
            for (int k = 1; k <= budget.steps; ++k) {
                z = raw(z);
                if (k > budget.skip) {
                    const Vec2 d = (z - z0) / static_cast<double>(k);
                    points.push_back(frame ? frame->apply(d) : d);
                }
            }
        }
        row_hulls[i] = geom::convex_hull(std::move(points));
    });
    std::vector<Vec2> all;
    for (const auto& h : row_hulls) all.insert(all.end(), h.begin(), h.end());
    return {geom::convex_hull(std::move(all)), budget};
}

RotationPolygon scaled(const RotationPolygon& p, double factor) {
    RotationPolygon out = p;
    for (auto& v : out.vertices) v = factor * v;
    return out;
}

RotationPolygon translated(const RotationPolygon& p, Vec2 v) {
    RotationPolygon out = p;
    for (auto& x : out.vertices) x += v;
    return out;
}

double hausdorff(const RotationPolygon& a, const RotationPolygon& b) {
    return geom::hausdorff(a.vertices, b.vertices, 512);
}

double check_homogeneity(const TorusLift& g, int k, const Budget& budget) {
    if (k < 1) throw InputError("homogeneity power must be >= 1");
    const RotationPolygon base = rotation_set_estimate(g, budget);
    if (k == 1) return hausdorff(base, base);
    return hausdorff(rotation_set_estimate(g.power(k), budget), scaled(base, k));
}

namespace {

struct FieldSample {
    double s;  // boundary parameter in [0, 4)
    Vec2 value;
};

Vec2 boundary_point(const Box& box, double s) {
    const auto c = box.corners();
    const int edge = std::min(3, static_cast<int>(s));
    const double t = s - edge;
    const Vec2 a = c[static_cast<std::size_t>(edge)];
    const Vec2 b = c[static_cast<std::size_t>((edge + 1) % 4)];
    return a + t * (b - a);
}

double turn(Vec2 u, Vec2 v) { return std::atan2(geom::cross(u, v), geom::dot(u, v)); }

}  // namespace

DegreeCertificate degree_on_box(const TorusLift& g, int q, std::array<std::int64_t, 2> p, const Box& box) {
    if (q < 1) throw InputError("q must be >= 1");
    if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y)) throw InputError("degree box must have positive size");
    const Vec2 shift{static_cast<double>(p[0]), static_cast<double>(p[1])};
    auto field = [&](double s) {
        const Vec2 z = boundary_point(box, s);
        return g.iterate(z, q) - z - shift;
    };

    DegreeCertificate cert;
    cert.box = box;
    cert.q = q;
    cert.p = p;
    cert.threshold = kDegreeThreshold;
    cert.min_norm = std::numeric_limits<double>::infinity();

    auto check = [&](const FieldSample& f) {
        const double n = geom::norm(f.value);
        cert.min_norm = std::min(cert.min_norm, n);
        if (!(n > kDegreeThreshold))
            throw IndeterminateBoundary("displacement field vanishes on the box boundary (|F| = " +
                                        std::to_string(n) + ")");
    };

    std::vector<FieldSample> samples;
    constexpr int kInitial = 32;
    for (int k = 0; k < kInitial; ++k) {
        const double s = 4.0 * k / kInitial;
        samples.push_back({s, field(s)});
        check(samples.back());
    }

    // Bisect every boundary step whose direction turns by pi/2 or more.
    std::size_t total = samples.size();
    std::vector<FieldSample> refined;
    bool changed = true;
    while (changed) {
        changed = false;
        refined.clear();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const FieldSample& a = samples[i];
            const FieldSample& b = samples[(i + 1) % samples.size()];
            refined.push_back(a);
            if (std::abs(turn(a.value, b.value)) >= std::numbers::pi / 2) {
                const double end = (i + 1 == samples.size()) ? 4.0 : b.s;
                const double mid = 0.5 * (a.s + end);
                if (mid == a.s || mid == end) throw IndeterminateBoundary("boundary refinement underflow");
                refined.push_back({mid, field(mid)});
                check(refined.back());
                changed = true;
                if (++total > kMaxDegreeSamples)
                    throw IndeterminateBoundary("degree sampling exceeded the sample cap");
            }
        }
        std::swap(samples, refined);
    }

    double winding = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        winding += turn(samples[i].value, samples[(i + 1) % samples.size()].value);
    cert.degree = static_cast<int>(std::lround(winding / (2 * std::numbers::pi)));
    cert.samples = samples.size();
    return cert;
}

namespace {

double residual(const TorusLift& g, int q, std::array<std::int64_t, 2> p, Vec2 z) {
    return geom::norm(g.iterate(z, q) - z - Vec2{static_cast<double>(p[0]), static_cast<double>(p[1])});
}

// Split offsets, as fractions of the box size, tried when the centre split
// lands on a zero of the field.
constexpr std::array<Vec2, kMaxPerturbations + 1> kSplitOffsets{{
    {0, 0},
    {0.25, 0.25},
    {-0.25, -0.25},
    {0.25, -0.25},
    {-0.25, 0.25},
    {0.125, 0.125},
    {-0.125, -0.125},
    {0.125, -0.125},
    {-0.125, 0.125},
}};

}  // namespace

PeriodicSearch find_periodic(const TorusLift& g, std::array<std::int64_t, 2> p, int q, const Box& seed) {
    if (q < 1) throw InputError("q must be >= 1");
    PeriodicSearch result;
    result.method = "failure";

    // Seed degree, perturbing the seed box by half-cell shifts if needed.
    std::optional<DegreeCertificate> top;
    for (std::size_t attempt = 0; attempt < kSplitOffsets.size() && !top; ++attempt) {
        const Vec2 size = seed.hi - seed.lo;
        const Vec2 off{kSplitOffsets[attempt].x * size.x * 0.5, kSplitOffsets[attempt].y * size.y * 0.5};
        try {
            top = degree_on_box(g, q, p, Box{seed.lo + off, seed.hi + off});
        } catch (const IndeterminateBoundary&) {
            if (attempt == 0) {
                const Vec2 c = seed.center();
                const double r = residual(g, q, p, c);
                if (r < 1e-12) {
                    result.point = c;
                    result.residual = r;
                    result.method = "direct";
                    return result;
                }
            }
            ++result.retries;
        }
    }
    if (!top) return result;
    result.certificates.push_back(*top);
    if (top->degree == 0) return result;

    Box box = top->box;
    for (int depth = 0; depth < kMaxSubdivisionDepth && box.diameter() >= kTargetDiameter; ++depth) {
        std::optional<DegreeCertificate> chosen;
        for (std::size_t attempt = 0; attempt < kSplitOffsets.size() && !chosen; ++attempt) {
            const Vec2 size = box.hi - box.lo;
            const Vec2 split = box.center() + Vec2{kSplitOffsets[attempt].x * size.x * 0.5,
                                                   kSplitOffsets[attempt].y * size.y * 0.5};
            const std::array<Box, 4> children{{
                {box.lo, split},
                {{split.x, box.lo.y}, {box.hi.x, split.y}},
                {split, box.hi},
                {{box.lo.x, split.y}, {split.x, box.hi.y}},
            }};
            std::vector<DegreeCertificate> certs;
            try {
                for (const auto& child : children) certs.push_back(degree_on_box(g, q, p, child));
            } catch (const IndeterminateBoundary&) {
                ++result.retries;
                continue;
            }
            for (const auto& c : certs) {
                result.certificates.push_back(c);
                if (!chosen && c.degree != 0) chosen = c;
            }
            if (!chosen) return result;  // degrees summed to zero: no certified child
        }
        // Every split was indeterminate: the field is at threshold scale, so
        // settle for the current certified box.
        if (!chosen) break;
        box = chosen->box;
        result.depth = static_cast<std::size_t>(depth) + 1;
    }
    const Vec2 z = box.center();
    result.residual = residual(g, q, p, z);
    if (result.residual < kResidualTolerance) {
        result.point = z;
        result.method = "degree";
    }
    return result;
}

std::vector<DeviationEntry> deviation_profile(const TorusLift& g, const RotationPolygon& rho, int grid,
                                              const std::vector<int>& n_list) {
    if (grid < 1) throw InputError("grid resolution must be >= 1");
    if (rho.vertices.empty()) throw InputError("deviation profile needs a rotation set estimate");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw InputError("iterate counts must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw InputError("iterate counts must be increasing");
    }
    if (n_list.empty()) return {};
    const auto m = static_cast<std::size_t>(grid);
    std::vector<std::vector<double>> rows(m, std::vector<double>(n_list.size(), 0.0));
    parallel_for(m, [&](std::size_t i) {
        auto& worst = rows[i];
        for (int j = 0; j < grid; ++j) {
            const Vec2 z0 = grid_point(static_cast<int>(i), j, grid);
            Vec2 z = z0;
            int done = 0;
            for (std::size_t k = 0; k < n_list.size(); ++k) {
                for (; done < n_list[k]; ++done) z = g(z);
                const auto target = scaled(rho, n_list[k]);
                worst[k] = std::max(worst[k], geom::point_polygon_distance(z - z0, target.vertices));
            }
        }
    });
    std::vector<DeviationEntry> out;
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        double w = 0;
        for (const auto& r : rows) w = std::max(w, r[k]);
        out.push_back({n_list[k], w});
    }
    return out;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<Vec2> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty()) throw InputError("a measure needs at least one point");
    if (points_.size() != weights_.size()) throw InputError("one weight per point is required");
    // Neumaier summation keeps the normalisation check meaningful for large grids.
    double sum = 0, comp = 0;
    for (const double w : weights_) {
        if (!(w >= 0)) throw InputError("measure weights must be non-negative");
        const double t = sum + w;
        comp += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
        sum = t;
    }
    if (std::abs(sum + comp - 1.0) > 1e-12) throw InputError("measure weights must sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform_grid(int m) {
    if (m < 1) throw InputError("grid resolution must be >= 1");
    std::vector<Vec2> pts;
    const auto count = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    pts.reserve(count);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) pts.push_back(grid_point(i, j, m));
    return EmpiricalMeasure(std::move(pts), std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

EmpiricalMeasure EmpiricalMeasure::dirac(Vec2 z) { return EmpiricalMeasure({z}, {1.0}); }

Vec2 measure_rotation(const TorusLift& g, const EmpiricalMeasure& mu) {
    Vec2 total{0, 0};
    for (std::size_t i = 0; i < mu.points().size(); ++i)
        total += mu.weights()[i] * (g(mu.points()[i]) - mu.points()[i]);
    return total;
}

std::optional<std::pair<std::int64_t, std::int64_t>> rational_approximation(double value, int max_denominator,
                                                                            double tol) {
    if (!std::isfinite(value) || max_denominator < 1) return std::nullopt;
    // Convergents h/k of the continued fraction of value. Any p/q within
    // 1/(2 q^2) of value is one of them.
    double x = value;
    std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
    std::int64_t k_prev = 0, k = 1;
    double frac = x - std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        if (k > max_denominator) break;
        if (std::abs(value - static_cast<double>(h) / static_cast<double>(k)) <= tol) return std::make_pair(h, k);
        if (frac < 1e-15) break;
        x = 1.0 / frac;
        const auto a = static_cast<std::int64_t>(std::floor(x));
        frac = x - std::floor(x);
        const std::int64_t h_next = a * h + h_prev;
        const std::int64_t k_next = a * k + k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
    }
    return std::nullopt;
}

std::vector<FlaggedEdge> boundary_diagnostic(const RotationPolygon& polygon, int max_denominator) {
    if (max_denominator < 1) throw InputError("denominator bound must be >= 1");
    const auto& v = polygon.vertices;
    std::vector<FlaggedEdge> out;
    if (v.size() < 2) return out;
    const std::size_t edges = v.size() == 2 ? 1 : v.size();
    constexpr double kTol = 1e-9;
    for (std::size_t e = 0; e < edges; ++e) {
        const Vec2 a = v[e], b = v[(e + 1) % v.size()];
        const Vec2 d = b - a;
        if (std::abs(d.x) <= kTol) continue;  // vertical: slope is rational (infinite)
        const double slope = d.y / d.x;
        if (rational_approximation(slope, max_denominator, kTol)) continue;
        // Walk the coordinate with the larger extent through every fraction
        // with denominator <= D strictly inside the edge.
        const bool along_x = std::abs(d.x) >= std::abs(d.y);
        const double lo = along_x ? std::min(a.x, b.x) : std::min(a.y, b.y);
        const double hi = along_x ? std::max(a.x, b.x) : std::max(a.y, b.y);
        std::optional<Vec2> witness;
        for (int den = 1; den <= max_denominator && !witness; ++den) {
            const auto first = static_cast<std::int64_t>(std::floor(lo * den)) - 1;
            const auto last = static_cast<std::int64_t>(std::ceil(hi * den)) + 1;
            for (std::int64_t num = first; num <= last && !witness; ++num) {
                const double c = static_cast<double>(num) / den;
                if (!(c > lo + kTol && c < hi - kTol)) continue;
                const double other = along_x ? a.y + slope * (c - a.x) : a.x + (c - a.y) / slope;
                if (const auto r = rational_approximation(other, max_denominator, kTol)) {
                    const double o = static_cast<double>(r->first) / static_cast<double>(r->second);
                    witness = along_x ? Vec2{c, o} : Vec2{o, c};
                }
            }
        }
        if (witness) out.push_back({e, a, b, slope, *witness});
    }
    return out;
}

}  // namespace forcekit::rotation
