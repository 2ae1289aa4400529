#include "forcekit/cli.hpp"

#include "forcekit/interval.hpp"
#include "forcekit/parallel.hpp"
#include "forcekit/plane.hpp"
#include "forcekit/rotation.hpp"
#include "forcekit/scenario.hpp"
#include "forcekit/symbolic.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace forcekit::cli {

namespace fs = std::filesystem;
using scenario::Json;

namespace {

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

Json vec(geom::Vec2 v) { return Json::array({v.x, v.y}); }

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json manifest(const std::string& command, const scenario::Document& doc, Json parameters, const Clock& clock) {
    Json m;
    m["tool"] = "forcekit";
    m["version"] = kVersion;
    m["command"] = command;
    m["scenario_hash"] = "fnv1a64:" + doc.hash;
    m["parameters"] = std::move(parameters);
    m["wall_clock_seconds"] = clock.seconds();
    return m;
}

// Sends each result to stdout or, with an output directory, to its own file.
class Sink {
public:
    Sink(std::string dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

    void json(const std::string& name, const Json& doc) {
        const std::string text = doc.dump(2) + "\n";
        if (dir_.empty())
            out_ << text;
        else
            write_atomic((fs::path(dir_) / name).string(), text);
    }

    void csv(const std::string& name, const std::string& text, const Json& manifest) {
        if (dir_.empty()) {
            out_ << text;
            return;
        }
        write_atomic((fs::path(dir_) / name).string(), text);
        write_atomic((fs::path(dir_) / (name + ".manifest.json")).string(), manifest.dump(2) + "\n");
    }

    bool to_files() const { return !dir_.empty(); }

private:
    std::string dir_;
    std::ostream& out_;
};

// ---------------------------------------------------------------- sft

struct SftArgs {
    std::string file;
    int period = 0;
    bool entropy = false;
    bool words = false;
};

int run_sft(const SftArgs& a, Sink& sink, std::ostream& out, std::ostream& err) {
    if (!a.entropy && a.period == 0) {
        err << "sft: nothing to do (use --entropy and/or --period)\n";
        return 2;
    }
    Clock clock;
    const auto doc = scenario::load(a.file);
    const auto m = scenario::read_sft(doc);
    Json result;
    std::ostringstream text;
    if (a.entropy) {
        const double h = symbolic::topological_entropy(m);
        result["entropy"] = h;
        text << std::fixed << std::setprecision(6) << h << "\n";
    }
    if (a.period != 0) {
        const auto count = symbolic::count_periodic_points(m, a.period);
        result["period"] = a.period;
        result["periodic_points"] = count.str();
        text << count.str() << "\n";
        if (a.words) {
            Json list = Json::array();
            for (const auto& w : symbolic::periodic_words(m, a.period)) {
                list.push_back({{"word", w.spell(m)}, {"minimal_period", w.minimal_period()}});
                text << w.spell(m) << "," << w.minimal_period() << "\n";
            }
            result["orbits"] = std::move(list);
        }
    }
    if (!sink.to_files()) {
        out << text.str();
        return 0;
    }
    Json params{{"period", a.period}, {"entropy", a.entropy}, {"words", a.words},
                {"max_enumeration_period", symbolic::kMaxEnumerationPeriod}};
    Json doc_out;
    doc_out["manifest"] = manifest("sft", doc, std::move(params), clock);
    doc_out["result"] = std::move(result);
    sink.json("sft.json", doc_out);
    return 0;
}

// ---------------------------------------------------------------- interval

struct IntervalArgs {
    std::string file;
    int max_period = 10;
};

int run_interval(const IntervalArgs& a, Sink& sink) {
    Clock clock;
    const auto doc = scenario::load(a.file);
    const auto sc = scenario::read_interval(doc);
    const auto graph = interval::build_covering_graph(sc.map, sc.partition);
    const auto certs = interval::forced_minimal_periods(graph, sc.map, sc.partition, a.max_period);
    const auto labels = graph.adjacency();
    std::ostringstream csv;
    csv << "period,itinerary,point,orbit,boundary\n";
    for (const auto& c : certs) {
        csv << c.period << "," << c.itinerary.spell(labels) << "," << to_string(c.point.x) << ",";
        for (std::size_t i = 0; i < c.point.orbit.size(); ++i) csv << (i ? ";" : "") << to_string(c.point.orbit[i]);
        csv << "," << (c.point.boundary ? "true" : "false") << "\n";
    }
    Json params{{"max_period", a.max_period}, {"arithmetic", "exact rational"}};
    sink.csv("interval.csv", csv.str(), manifest("interval", doc, std::move(params), clock));
    return 0;
}

// ---------------------------------------------------------------- rotation

struct RotationArgs {
    std::string file;
    int grid = 64;
    int steps = 256;
    int skip = 0;
    std::vector<std::int64_t> find;
    std::vector<double> box{-0.25, -0.25, 0.25, 0.25};
    bool deviation = false;
    std::vector<int> deviation_n{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    bool measure = false;
};

Json certificate_json(const rotation::DegreeCertificate& c) {
    return Json{{"box", Json::array({vec(c.box.lo), vec(c.box.hi)})},
                {"q", c.q},
                {"p", Json::array({c.p[0], c.p[1]})},
                {"degree", c.degree},
                {"min_norm", c.min_norm},
                {"threshold", c.threshold},
                {"samples", c.samples}};
}

int run_rotation(const RotationArgs& a, Sink& sink, std::ostream& err) {
    const int modes = (a.find.empty() ? 0 : 1) + (a.deviation ? 1 : 0) + (a.measure ? 1 : 0);
    if (modes > 1) {
        err << "rotation: choose at most one of --find-periodic, --deviation, --measure\n";
        return 2;
    }
    if (a.box.size() != 4) {
        err << "rotation: --box takes xmin ymin xmax ymax\n";
        return 2;
    }
    Clock clock;
    const auto doc = scenario::load(a.file);
    const auto lift = scenario::read_rotation(doc);
    const rotation::Budget budget{a.grid, a.skip, a.steps};
    Json params{{"grid", a.grid}, {"n", a.steps}, {"N", a.skip}};

    if (!a.find.empty()) {
        const geom::Box box{{a.box[0], a.box[1]}, {a.box[2], a.box[3]}};
        const int q = static_cast<int>(a.find[2]);
        const auto search = rotation::find_periodic(lift, {a.find[0], a.find[1]}, q, box);
        params["p"] = Json::array({a.find[0], a.find[1]});
        params["q"] = q;
        params["seed_box"] = a.box;
        params["degree_threshold"] = rotation::kDegreeThreshold;
        params["target_diameter"] = rotation::kTargetDiameter;
        params["residual_tolerance"] = rotation::kResidualTolerance;
        params["max_depth"] = rotation::kMaxSubdivisionDepth;
        params["max_perturbations"] = rotation::kMaxPerturbations;
        Json out;
        out["manifest"] = manifest("rotation", doc, std::move(params), clock);
        out["method"] = search.method;
        out["point"] = search.point ? vec(*search.point) : Json(nullptr);
        out["residual"] = search.residual;
        out["depth"] = search.depth;
        out["retries"] = search.retries;
        Json certs = Json::array();
        for (const auto& c : search.certificates) certs.push_back(certificate_json(c));
        out["certificates"] = std::move(certs);
        sink.json("degree.json", out);
        return 0;
    }

    if (a.measure) {
        const auto mu = rotation::EmpiricalMeasure::uniform_grid(a.grid);
        const auto rho = rotation::measure_rotation(lift, mu);
        Json out;
        params["measure"] = "uniform grid";
        out["manifest"] = manifest("rotation", doc, std::move(params), clock);
        out["rotation_vector"] = vec(rho);
        sink.json("measure.json", out);
        return 0;
    }

    const auto polygon = rotation::rotation_set_estimate(lift, budget);
    if (a.deviation) {
        const auto profile = rotation::deviation_profile(lift, polygon, a.grid, a.deviation_n);
        std::ostringstream csv;
        csv << "n,deviation\n";
        for (const auto& e : profile) csv << e.n << "," << shortest(e.deviation) << "\n";
        params["deviation_n"] = a.deviation_n;
        sink.csv("deviation.csv", csv.str(), manifest("rotation", doc, std::move(params), clock));
        return 0;
    }
    std::ostringstream csv;
    csv << "x,y\n";
    for (const auto& v : polygon.vertices) csv << shortest(v.x) << "," << shortest(v.y) << "\n";
    sink.csv("hull.csv", csv.str(), manifest("rotation", doc, std::move(params), clock));
    return 0;
}

// ---------------------------------------------------------------- forcing

struct ForcingArgs {
    std::string file;
    std::size_t derive = 0;
    std::vector<std::int64_t> certify;
    std::string path;
};

Json path_json(const plane::TransversePath& p) {
    Json crossings = Json::array();
    for (const auto& c : p.crossings) crossings.push_back({{"leaf", c.leaf}, {"t", c.t}});
    Json vertices = Json::array();
    for (const auto& v : p.vertices) vertices.push_back(vec(v));
    Json out{{"start", p.start_leaf}, {"end", p.end_leaf}, {"crossings", std::move(crossings)},
             {"vertices", std::move(vertices)}};
    if (!p.slides.empty()) {
        Json slides = Json::array();
        for (const auto& [a, b] : p.slides) slides.push_back(Json::array({a, b}));
        out["slides"] = std::move(slides);
    }
    return out;
}

Json intersection_json(const plane::TransverseIntersection& x) {
    return Json{{"leaf", x.leaf}, {"t1", x.t1}, {"t2", x.t2}, {"point1", vec(x.point1)}, {"point2", vec(x.point2)},
                {"swapped", x.swapped}};
}

int run_forcing(const ForcingArgs& a, Sink& sink, std::ostream& err) {
    if (!a.certify.empty() && a.certify.size() != 3) {
        err << "forcing: --certify takes q Tx Ty\n";
        return 2;
    }
    Clock clock;
    const auto doc = scenario::load(a.file);
    const auto sc = scenario::read_forcing(doc);
    const auto& chart = sc.chart;
    const geom::Box& box = chart.box();

    Json out;
    Json params{{"derive_budget", a.derive},
                {"side_tolerance", plane::kSideTolerance},
                {"on_tolerance", plane::kOnTolerance},
                {"witness_arcs", "straight segments and two-segment arcs through box corners"},
                {"densify", 1e-3}};
    if (!a.certify.empty()) params["certify"] = a.certify;

    Json leaves = Json::array();
    for (const auto& [label, line] : chart.leaves()) leaves.push_back(label);
    Json paths = Json::object();
    for (const auto& [id, p] : sc.paths) paths[id] = path_json(p);

    Json queries = Json::object();
    Json above = Json::array();
    for (const auto& q : sc.above_queries) {
        Json entry{{"phi2", q[0]}, {"phi1", q[1]}, {"phi", q[2]}};
        try {
            entry["above"] = plane::is_above(chart.leaf(q[0]), chart.leaf(q[1]), chart.leaf(q[2]), box);
        } catch (const DeductionError& e) {
            entry["error"] = e.what();
        }
        above.push_back(std::move(entry));
    }
    queries["above"] = std::move(above);
    Json brouwer = Json::array();
    for (const auto& label : sc.brouwer_queries) {
        const auto check = plane::is_brouwer_line(chart.leaf(label), *sc.map, box);
        brouwer.push_back({{"leaf", label},
                           {"verdict", plane::to_string(check.verdict)},
                           {"margin", check.margin},
                           {"worst_sample", vec(check.worst_sample)},
                           {"samples", check.samples}});
    }
    queries["brouwer"] = std::move(brouwer);
    Json inters = Json::array();
    for (const auto& q : sc.intersection_queries) {
        Json entry{{"gamma1", q[0]}, {"gamma2", q[1]}};
        const auto x = plane::find_transverse_intersection(sc.path(q[0]), sc.path(q[1]), chart);
        entry["intersection"] = x ? intersection_json(*x) : Json(nullptr);
        inters.push_back(std::move(entry));
    }
    queries["intersections"] = std::move(inters);

    plane::FactBase base(chart);
    for (std::size_t i = 0; i < sc.facts.size(); ++i) {
        const auto& spec = sc.facts[i];
        const auto& path = sc.path(spec.path);
        if (spec.provenance == plane::Provenance::Kind::geometric_check) {
            const auto verdict = plane::is_admissible_geometric(path, spec.order, *sc.map, chart);
            if (verdict != plane::Verdict::yes)
                throw DeductionError("fact " + std::to_string(i) + " (path '" + spec.path + "', order " +
                                     std::to_string(spec.order) + ") failed its geometric check: " +
                                     plane::to_string(verdict));
            base.add_checked(path, spec.order);
        } else {
            base.add_given(path, spec.order);
        }
    }
    if (a.derive > 0) base.derive(a.derive);

    Json facts = Json::array();
    for (const auto& f : base.facts()) {
        Json entry{{"id", f.id}, {"order", f.order}, {"path", path_json(f.path)}};
        Json prov{{"kind", plane::to_string(f.provenance.kind)}};
        if (f.provenance.kind == plane::Provenance::Kind::forcing_step) {
            prov["parents"] = Json::array({f.provenance.parent1, f.provenance.parent2});
            prov["intersection"] = intersection_json(*f.provenance.via);
        }
        entry["provenance"] = std::move(prov);
        if (f.disjunction) {
            entry["disjunction"] = {{"both_at_order", f.disjunction->max_order},
                                    {"or_one_at_order", f.disjunction->min_order},
                                    {"facts", Json::array({f.disjunction->facts[0], f.disjunction->facts[1]})}};
        }
        if (sc.map && f.provenance.kind == plane::Provenance::Kind::forcing_step && f.path.slides.empty())
            entry["geometric_check"] = plane::to_string(plane::is_admissible_geometric(f.path, f.order, *sc.map, chart));
        facts.push_back(std::move(entry));
    }
    Json skipped = Json::array();
    for (const auto& s : base.skipped())
        skipped.push_back({{"facts", Json::array({s.first, s.second})}, {"reason", s.reason}});

    Json certificate = nullptr;
    if (!a.certify.empty()) {
        if (sc.paths.empty()) throw InputError("--certify needs a path in the scenario");
        const std::string id = a.path.empty() ? sc.paths.front().first : a.path;
        const auto cert = plane::horseshoe_certificate(sc.path(id), static_cast<int>(a.certify[0]),
                                                       {a.certify[1], a.certify[2]}, chart);
        if (cert) {
            Json translated = Json::object();
            for (const auto& [from, to] : cert->translated_leaves) translated[from] = to;
            certificate = Json{{"path", id},
                               {"q", cert->q},
                               {"deck", Json::array({cert->deck[0], cert->deck[1]})},
                               {"intersection", intersection_json(cert->intersection)},
                               {"entropy_lower_bound", cert->entropy_bound},
                               {"translated_leaves", std::move(translated)}};
        } else {
            certificate = Json{{"path", id}, {"found", false}};
        }
    }

    const Json m = manifest("forcing", doc, std::move(params), clock);
    out["manifest"] = m;
    out["leaves"] = std::move(leaves);
    out["paths"] = std::move(paths);
    out["queries"] = std::move(queries);
    out["facts"] = std::move(facts);
    out["skipped"] = std::move(skipped);
    if (sink.to_files()) {
        sink.json("facts.json", out);
        if (!a.certify.empty()) sink.json("certificate.json", Json{{"manifest", m}, {"certificate", certificate}});
    } else {
        out["certificate"] = std::move(certificate);
        sink.json("", out);
    }
    return 0;
}

}  // namespace

void write_atomic(const std::string& path, const std::string& bytes) {
    const fs::path target(path);
    const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    fs::create_directories(dir);
    const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + tmp.string());
        f << bytes;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forcing-theory toolkit: symbolic dynamics, interval maps, rotation sets, planar forcing"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    int threads = -1;
    std::string out_dir;
    app.add_option("--threads", threads, "Worker threads (0 = machine parallelism; overrides FORCING_THREADS)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out-dir", out_dir, "Write results as files in this directory instead of stdout");

    SftArgs sa;
    auto* sft = app.add_subcommand("sft", "Subshift of finite type: periodic points and entropy");
    sft->add_option("--matrix-file", sa.file, "Scenario with kind \"sft\"")->required();
    sft->add_option("--period", sa.period, "Count periodic points of this period")->check(CLI::PositiveNumber);
    sft->add_flag("--entropy", sa.entropy, "Print the topological entropy (6 decimals)");
    sft->add_flag("--words", sa.words, "With --period, list primitive periodic orbits");

    IntervalArgs ia;
    auto* itv = app.add_subcommand("interval", "Exact periodic orbits forced by a PL interval map");
    itv->add_option("--map-file", ia.file, "Scenario with kind \"interval\"")->required();
    itv->add_option("--max-period", ia.max_period, "Largest minimal period to certify")->check(CLI::PositiveNumber);

    RotationArgs ra;
    auto* rot = app.add_subcommand("rotation", "Rotation sets and periodic points of torus lifts");
    rot->add_option("--lift-file", ra.file, "Scenario with kind \"rotation\"")->required();
    rot->add_option("--grid", ra.grid, "Start grid side m")->check(CLI::PositiveNumber);
    rot->add_option("--n", ra.steps, "Last iterate n")->check(CLI::PositiveNumber);
    rot->add_option("--N", ra.skip, "Ignore iterates up to N")->check(CLI::NonNegativeNumber);
    rot->add_option("--find-periodic", ra.find, "Search g^q(z) = z + p: p1 p2 q")->expected(3);
    rot->add_option("--box", ra.box, "Seed box for --find-periodic: xmin ymin xmax ymax")->expected(4);
    rot->add_flag("--deviation", ra.deviation, "Emit the deviation profile");
    rot->add_option("--deviation-n", ra.deviation_n, "Iterates for --deviation")->expected(1, 64);
    rot->add_flag("--measure", ra.measure, "Rotation vector of the uniform grid measure");

    ForcingArgs fa;
    auto* frc = app.add_subcommand("forcing", "Planar forcing: above relation, transverse intersections, facts");
    frc->add_option("--scenario-file", fa.file, "Scenario with kind \"forcing\"")->required();
    frc->add_option("--derive", fa.derive, "Close the fact base under forcing steps up to this many facts");
    frc->add_option("--certify", fa.certify, "Horseshoe certificate: q Tx Ty")->expected(3);
    frc->add_option("--path", fa.path, "Path id for --certify (default: first path)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (threads >= 0) {
        set_thread_count(static_cast<unsigned>(threads));
    } else if (const char* env = std::getenv("FORCING_THREADS")) {
        unsigned n = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            err << "FORCING_THREADS must be a non-negative integer\n";
            return 2;
        }
        set_thread_count(n);
    }

    Sink sink(out_dir, out);
    try {
        if (*sft) return run_sft(sa, sink, out, err);
        if (*itv) return run_interval(ia, sink);
        if (*rot) return run_rotation(ra, sink, err);
        if (*frc) return run_forcing(fa, sink, err);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace forcekit::cli
