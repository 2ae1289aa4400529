// Acceptance runner: one PASS/FAIL line per criterion, with pinned tolerances
// and wall-clock limits. Exit status is nonzero if any criterion fails.

#include "forcekit/cli.hpp"
#include "forcekit/interval.hpp"
#include "forcekit/plane.hpp"
#include "forcekit/rotation.hpp"
#include "forcekit/scenario.hpp"
#include "forcekit/symbolic.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace forcekit;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects failed checks without stopping at the first one.
struct Checker {
    Outcome out;
    std::ostringstream notes;

    void check(bool cond, const std::string& what) {
        if (!cond) {
            out.ok = false;
            notes << "failed: " << what << "; ";
        }
    }
    void note(const std::string& s) { notes << s << "; "; }
    Outcome done() {
        out.detail = notes.str();
        if (out.detail.size() >= 2) out.detail.resize(out.detail.size() - 2);
        return out;
    }
};

std::string path_of(const std::string& name) { return std::string(FORCEKIT_SOURCE_DIR) + "/scenarios/" + name; }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

std::string fmt(double x) {
    std::ostringstream o;
    o.precision(6);
    o << x;
    return o.str();
}

Outcome sharkovsky() {
    Checker c;
    std::ostringstream out, err;
    const int rc = cli::dispatch({"forcekit", "interval", "--map-file", path_of("sharko.json"), "--max-period", "10"}, out,
                                 err);
    c.check(rc == 0, "interval exit status 0");
    const auto sc = scenario::read_interval(scenario::load(path_of("sharko.json")));
    const auto& f = sc.map;
    std::set<int> periods;
    auto lines = split(out.str(), '\n');
    c.check(!lines.empty() && lines[0] == "period,itinerary,point,orbit,boundary", "CSV header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = split(lines[i], ',');
        if (cols.size() != 5) {
            c.check(false, "row shape");
            continue;
        }
        const int period = std::stoi(cols[0]);
        const Rational x = parse_rational(cols[2]);
        std::vector<Rational> orbit;
        for (const auto& s : split(cols[3], ';')) orbit.push_back(parse_rational(s));
        Rational y = x;
        for (int j = 0; j < period; ++j) {
            c.check(orbit.at(static_cast<std::size_t>(j)) == y, "orbit entry " + std::to_string(j) + " at period " + cols[0]);
            y = f(y);
            if (j + 1 < period) c.check(y != x, "minimality at period " + cols[0]);
        }
        c.check(y == x, "f^T(x) = x at period " + cols[0]);
        periods.insert(period);
        if (period == 1) c.check(x == parse_rational("4/3"), "period-1 point is 4/3");
        if (period == 2) c.check(orbit == std::vector<Rational>{parse_rational("2/3"), parse_rational("5/3")}, "period-2 orbit {2/3, 5/3}");
    }
    c.check(periods == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, "all periods 1..10 certified");
    c.note("periods " + std::to_string(periods.size()) + "/10 exact");
    return c.done();
}

Outcome symbolic_consistency() {
    Checker c;
    const auto fib = symbolic::TransitionMatrix::fibonacci();
    const double golden = std::log((1 + std::sqrt(5.0)) / 2);
    const double h = symbolic::topological_entropy(fib);
    const double hc = std::log(symbolic::spectral_radius_charpoly(fib));
    c.check(std::abs(h - golden) <= 1e-9, "power-iteration entropy within 1e-9");
    c.check(std::abs(hc - golden) <= 1e-9, "charpoly entropy within 1e-9");
    c.note("h = " + fmt(h));
    for (const auto& a : {fib, symbolic::TransitionMatrix::full_shift(2),
                          symbolic::TransitionMatrix({{1, 1, 0}, {0, 0, 1}, {1, 1, 1}})}) {
        const std::size_t q = a.size();
        for (int p = 1; p <= 12; ++p) {
            // Brute force over all q^p words.
            long long count = 0;
            std::vector<std::size_t> w(static_cast<std::size_t>(p), 0);
            while (true) {
                bool ok = true;
                for (int j = 0; j < p && ok; ++j) ok = a.edge(w[j], w[(j + 1) % p]);
                count += ok;
                int k = 0;
                while (k < p && ++w[k] == q) w[k++] = 0;
                if (k == p) break;
            }
            c.check(symbolic::count_periodic_points(a, p) == count, "trace = brute force at p = " + std::to_string(p));
        }
    }
    return c.done();
}

Outcome rotation_sets() {
    using namespace rotation;
    Checker c;
    const auto t = rotation_set_estimate(TorusLift::translation({0.3, 0.7}), {32, 0, 64});
    c.check(t.vertices.size() == 1 && geom::dist(t.vertices[0], {0.3, 0.7}) <= 1e-12, "translation singleton within 1e-12");

    const TorusLift shear({HorizontalShear{Profile::raised_cosine, 1.0}});
    const Budget b{256, 0, 512};
    const auto s = rotation_set_estimate(shear, b);
    const double hs = hausdorff(s, RotationPolygon{{{0, 0}, {1, 0}}, b});
    c.check(hs <= 1e-2, "raised-cosine segment within 1e-2");
    const double hom = check_homogeneity(shear, 2, b);
    c.check(hom <= 1e-2, "homogeneity within 1e-2");

    const TorusLift coupled({HorizontalShear{Profile::sine, 0.4}, VerticalShear{Profile::sine, 0.4}});
    const Budget small{32, 0, 64};
    const auto base = rotation_set_estimate(coupled, small);
    double cov = 0;
    for (const auto& v : std::vector<std::array<std::int64_t, 2>>{{1, 0}, {-2, 3}}) {
        auto comp = coupled.composition();
        comp.push_back(IntegerTranslation{v[0], v[1]});
        cov = std::max(cov, hausdorff(rotation_set_estimate(TorusLift(comp), small),
                                      translated(base, {double(v[0]), double(v[1])})));
    }
    c.check(cov <= 1e-9, "lift-translation covariance within 1e-9");
    c.note("segment " + fmt(hs) + ", homogeneity " + fmt(hom) + ", covariance " + fmt(cov));
    return c.done();
}

Outcome franks() {
    using namespace rotation;
    Checker c;
    const TorusLift coupled({HorizontalShear{Profile::sine, 0.4}, VerticalShear{Profile::sine, 0.4}});
    const auto r = find_periodic(coupled, {0, 0}, 1, Box{{-0.25, -0.25}, {0.25, 0.25}});
    c.check(r.point.has_value(), "fixed point found");
    c.check(r.method == "degree", "located by degree");
    c.check(r.residual < 1e-8, "residual < 1e-8");
    c.check(!r.certificates.empty() && r.certificates.front().degree != 0, "nonzero seed degree");
    c.note("residual " + fmt(r.residual) + ", seed degree " +
           (r.certificates.empty() ? std::string("none") : std::to_string(r.certificates.front().degree)));

    const auto neg = find_periodic(TorusLift::translation({0.5, 0}), {0, 1}, 1, Box{{-0.25, -0.25}, {0.25, 0.25}});
    c.check(!neg.point && neg.method == "failure", "negative control fails");
    bool all_zero = !neg.certificates.empty();
    for (const auto& cert : neg.certificates) all_zero = all_zero && cert.degree == 0;
    c.check(all_zero, "negative control degrees all 0");
    return c.done();
}

Outcome bounded_deviation() {
    using namespace rotation;
    Checker c;
    const TorusLift coupled({HorizontalShear{Profile::sine, 0.4}, VerticalShear{Profile::sine, 0.4}});
    // Skip the transient so short-time displacements do not inflate the set,
    // and sample the deviation off the estimator's grid.
    const auto rho = rotation_set_estimate(coupled, {64, 256, 512});
    std::vector<int> ns;
    for (int n = 16; n <= 4096; n *= 2) ns.push_back(n);
    const auto prof = deviation_profile(coupled, rho, 31, ns);
    std::ostringstream s;
    s << "profile";
    for (const auto& e : prof) s << ' ' << e.n << ':' << fmt(e.deviation);
    c.note(s.str());
    c.check(prof.size() == ns.size(), "one entry per n");
    c.check(!prof.empty() && prof.back().deviation < 0.1 * prof.back().n, "profile(n_max) < 0.1 n_max");
    return c.done();
}

Outcome forcing_calculus() {
    using namespace plane;
    Checker c;
    const auto fig4 = scenario::read_forcing(scenario::load(path_of("fig4.json")));
    const auto& c4 = fig4.chart;
    c.check(is_above(c4.leaf("A2"), c4.leaf("A1"), c4.leaf("phi"), c4.box()), "Fig. 4 is_above");

    const auto fig5 = scenario::read_forcing(scenario::load(path_of("fig5.json")));
    const auto& g1 = fig5.path("gamma1");
    const auto& g2 = fig5.path("gamma2");
    const auto x = find_transverse_intersection(g1, g2, fig5.chart);
    c.check(x && x->leaf == "phi", "Fig. 5 transverse intersection at phi");
    if (x) {
        const auto facts = forcing_step({0, g1, 2, {}, {}}, {1, g2, 3, {}, {}}, *x, fig5.chart);
        c.check(facts.size() == 2, "two concatenations");
        for (const auto& f : facts) {
            c.check(f.order == 5, "order 5");
            c.check(f.disjunction && f.disjunction->max_order == 3 && f.disjunction->min_order == 2,
                    "disjunction {both at 3} or {one at 2}");
        }
    }

    const auto bm = scenario::read_forcing(scenario::load(path_of("brouwer_model.json")));
    FactBase base(bm.chart);
    for (const auto& spec : bm.facts) base.add_checked(bm.path(spec.path), spec.order);
    base.derive(10);
    int confirmed = 0, emitted = 0;
    for (const auto& f : base.facts()) {
        if (f.provenance.kind != Provenance::Kind::forcing_step || f.order != 5) continue;
        ++emitted;
        confirmed += is_admissible_geometric(f.path, f.order, *bm.map, bm.chart) == Verdict::yes;
    }
    c.check(emitted == 2 && confirmed == emitted, "Brouwer-model order-5 facts confirmed geometrically");
    c.note(std::to_string(confirmed) + "/" + std::to_string(emitted) + " order-5 facts confirmed");

    const auto hs = scenario::read_forcing(scenario::load(path_of("horseshoe.json")));
    const auto cert = horseshoe_certificate(hs.path("gamma"), 2, {0, 1}, hs.chart);
    c.check(cert && std::abs(cert->entropy_bound - std::log(4.0) / 6) <= 1e-15, "q = 2 bound equals log(4)/6");
    return c.done();
}

Outcome brouwer_predicate() {
    using namespace plane;
    Checker c;
    const ProperLine up({{0, -1}, {0, 1}});
    const Box box{{-5, -5}, {5, 5}};
    const auto fwd = is_brouwer_line(up, PlanarMap({Translation{{1, 0}}}), box);
    const auto id = is_brouwer_line(up, PlanarMap{}, box);
    const auto back = is_brouwer_line(up, PlanarMap({Translation{{-1, 0}}}), box);
    c.check(fwd.verdict == Verdict::yes && std::abs(fwd.margin - 1) <= 1e-9, "translation: yes, margin 1");
    c.check(id.verdict == Verdict::no && std::abs(id.margin) <= 1e-12, "identity: no, margin 0");
    c.check(back.verdict == Verdict::no && std::abs(back.margin + 1) <= 1e-9, "back-translation: no, margin -1");
    c.note("margins " + fmt(fwd.margin) + ", " + fmt(id.margin) + ", " + fmt(back.margin));
    return c.done();
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"sharkovsky periods 1..10 exact", 5, sharkovsky},
        {"symbolic entropy and trace counts", 1, symbolic_consistency},
        {"rotation set estimates", 60, rotation_sets},
        {"degree-based fixed point search", 30, franks},
        {"bounded deviation profile", 120, bounded_deviation},
        {"forcing calculus scenarios", 5, forcing_calculus},
        {"brouwer line predicate", 1, brouwer_predicate},
    };
    int failures = 0;
    int index = 0;
    for (const auto& cr : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < cr.limit_seconds;
        const bool pass = o.ok && in_time;
        failures += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " [" << index << "] " << cr.name << " (" << fmt(secs) << " s, limit "
                  << cr.limit_seconds << " s" << (in_time ? "" : ", over time") << ")";
        if (!o.detail.empty()) std::cout << ": " << o.detail;
        std::cout << '\n';
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
