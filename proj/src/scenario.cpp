#include "forcekit/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace forcekit::scenario {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ScenarioError(where + ": " + what);
}

// Tracks which keys of an object were consumed so leftovers can be rejected.
class Fields {
public:
    Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail(where_, "expected an object");
    }

    const Json& required(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) fail(where_, "missing field '" + key + "'");
        return j_.at(key);
    }
    const Json* optional(const std::string& key) {
        used_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }
    std::string at(const std::string& key) const { return where_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail(where_, "unknown field '" + it.key() + "'");
    }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> used_;
};

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "expected a finite number");
    return v;
}

std::int64_t integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<std::int64_t>();
}

std::string text(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

bool boolean(const Json& j, const std::string& where) {
    if (!j.is_boolean()) fail(where, "expected true or false");
    return j.get<bool>();
}

const Json& array(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    return j;
}

std::string index(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

Rational exact(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (!j.is_string()) fail(where, "expected a rational string such as \"3/2\" or an integer");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const InputError& e) {
        fail(where, e.what());
    }
}

geom::Vec2 point(const Json& j, const std::string& where) {
    array(j, where);
    if (j.size() != 2) fail(where, "expected [x, y]");
    return {number(j[0], index(where, 0)), number(j[1], index(where, 1))};
}

std::vector<geom::Vec2> points(const Json& j, const std::string& where) {
    array(j, where);
    std::vector<geom::Vec2> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], index(where, i)));
    return out;
}

Profile profile(const Json& j, const std::string& where) {
    try {
        return parse_profile(text(j, where));
    } catch (const InputError& e) {
        fail(where, e.what());
    }
}

void expect_kind(const Document& doc, const std::string& kind) {
    if (doc.kind != kind) fail("$.kind", "expected \"" + kind + "\", found \"" + doc.kind + "\"");
}

// Runs a domain constructor, reporting its validation failure as a scenario error.
template <typename F>
auto build(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Document parse(std::string_view raw, const std::string& origin) {
    Document doc;
    doc.origin = origin;
    doc.hash = fnv1a_hex(raw);
    try {
        doc.body = Json::parse(raw.begin(), raw.end());
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, raw.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (raw[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ScenarioError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                            ": malformed JSON");
    }
    if (!doc.body.is_object()) fail("$", "scenario must be a JSON object");
    if (!doc.body.contains("kind")) fail("$", "missing field 'kind'");
    doc.kind = text(doc.body.at("kind"), "$.kind");
    static const std::set<std::string> kinds{"sft", "interval", "rotation", "forcing"};
    if (!kinds.count(doc.kind)) fail("$.kind", "unknown kind \"" + doc.kind + "\"");
    return doc;
}

Document load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

symbolic::TransitionMatrix read_sft(const Document& doc) {
    expect_kind(doc, "sft");
    Fields f(doc.body, "$");
    f.required("kind");
    const std::string where = f.at("transition_matrix");
    const Json& rows = array(f.required("transition_matrix"), where);
    std::vector<std::vector<std::int64_t>> m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string w = index(where, i);
        array(rows[i], w);
        std::vector<std::int64_t> row;
        for (std::size_t j = 0; j < rows[i].size(); ++j) row.push_back(integer(rows[i][j], index(w, j)));
        m.push_back(std::move(row));
    }
    std::vector<std::string> labels;
    if (const Json* l = f.optional("labels")) {
        array(*l, f.at("labels"));
        for (std::size_t i = 0; i < l->size(); ++i) labels.push_back(text((*l)[i], index(f.at("labels"), i)));
    }
    f.finish();
    return build(where, [&] { return symbolic::TransitionMatrix(std::move(m), std::move(labels)); });
}

IntervalScenario read_interval(const Document& doc) {
    expect_kind(doc, "interval");
    Fields f(doc.body, "$");
    f.required("kind");
    const std::string where = f.at("breakpoints");
    const Json& bps = array(f.required("breakpoints"), where);
    std::vector<interval::PLMap::Breakpoint> points;
    for (std::size_t i = 0; i < bps.size(); ++i) {
        const std::string w = index(where, i);
        array(bps[i], w);
        if (bps[i].size() != 2) fail(w, "expected [x, y]");
        points.push_back({exact(bps[i][0], index(w, 0)), exact(bps[i][1], index(w, 1))});
    }
    std::vector<Rational> ends;
    if (const Json* p = f.optional("partition")) {
        array(*p, f.at("partition"));
        for (std::size_t i = 0; i < p->size(); ++i) ends.push_back(exact((*p)[i], index(f.at("partition"), i)));
    } else {
        for (const auto& b : points) ends.push_back(b.x);
    }
    f.finish();
    auto map = build(where, [&] { return interval::PLMap(points); });
    auto partition = build("$.partition", [&] { return interval::IntervalPartition(ends); });
    if (partition.endpoints().front() != map.domain().lo || partition.endpoints().back() != map.domain().hi)
        fail("$.partition", "partition must span the map's domain");
    return {std::move(map), std::move(partition)};
}

namespace {

template <typename Translation, typename HShear, typename VShear, typename Out, typename Extra>
void read_primitives(const Json& list, const std::string& where, std::vector<Out>& out, Extra&& extra) {
    array(list, where);
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string w = index(where, i);
        Fields f(list[i], w);
        const std::string type = text(f.required("type"), f.at("type"));
        if (type == "translation") {
            const geom::Vec2 v = point(f.required("vector"), f.at("vector"));
            out.push_back(Translation{v});
        } else if (type == "hshear" || type == "vshear") {
            const Profile p = profile(f.required("profile"), f.at("profile"));
            const double a = number(f.required("amplitude"), f.at("amplitude"));
            if (type == "hshear")
                out.push_back(HShear{p, a});
            else
                out.push_back(VShear{p, a});
        } else if (!extra(type, f, out)) {
            fail(f.at("type"), "unknown primitive type \"" + type + "\"");
        }
        f.finish();
    }
}

}  // namespace

rotation::TorusLift read_rotation(const Document& doc) {
    expect_kind(doc, "rotation");
    Fields f(doc.body, "$");
    f.required("kind");
    std::vector<rotation::Primitive> prims;
    read_primitives<rotation::RealTranslation, rotation::HorizontalShear, rotation::VerticalShear>(
        f.required("composition"), f.at("composition"), prims,
        [](const std::string& type, Fields& g, std::vector<rotation::Primitive>& out) {
            if (type != "integer-translation") return false;
            const Json& v = array(g.required("vector"), g.at("vector"));
            if (v.size() != 2) fail(g.at("vector"), "expected [dx, dy]");
            out.push_back(rotation::IntegerTranslation{integer(v[0], g.at("vector") + "[0]"),
                                                       integer(v[1], g.at("vector") + "[1]")});
            return true;
        });
    std::optional<rotation::UnimodularMatrix> frame;
    if (const Json* m = f.optional("frame")) {
        const std::string w = f.at("frame");
        array(*m, w);
        if (m->size() != 2 || !(*m)[0].is_array() || !(*m)[1].is_array() || (*m)[0].size() != 2 ||
            (*m)[1].size() != 2)
            fail(w, "expected [[a, b], [c, d]]");
        frame = rotation::UnimodularMatrix{integer((*m)[0][0], w), integer((*m)[0][1], w), integer((*m)[1][0], w),
                                           integer((*m)[1][1], w)};
    }
    f.finish();
    return build(f.at("composition"), [&] { return rotation::TorusLift(std::move(prims), frame); });
}

plane::PlanarMap read_planar_map(const Json& composition, const std::string& where) {
    std::vector<plane::MapPrimitive> prims;
    read_primitives<plane::Translation, plane::HorizontalShear, plane::VerticalShear>(
        composition, where, prims, [](const std::string& type, Fields& g, std::vector<plane::MapPrimitive>& out) {
            if (type != "linear") return false;
            const std::string w = g.at("matrix");
            const Json& m = array(g.required("matrix"), w);
            if (m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 || m[1].size() != 2)
                fail(w, "expected [[a, b], [c, d]]");
            out.push_back(plane::LinearMap{number(m[0][0], w), number(m[0][1], w), number(m[1][0], w),
                                           number(m[1][1], w)});
            return true;
        });
    return build(where, [&] { return plane::PlanarMap(std::move(prims)); });
}

const plane::TransversePath& ForcingScenario::path(const std::string& id) const {
    for (const auto& [name, p] : paths)
        if (name == id) return p;
    throw InputError("unknown path '" + id + "'");
}

ForcingScenario read_forcing(const Document& doc) {
    expect_kind(doc, "forcing");
    Fields f(doc.body, "$");
    f.required("kind");

    const Json& b = array(f.required("box"), f.at("box"));
    if (b.size() != 2) fail(f.at("box"), "expected [[xmin, ymin], [xmax, ymax]]");
    const geom::Box box{point(b[0], f.at("box") + "[0]"), point(b[1], f.at("box") + "[1]")};
    bool vertical = false;
    if (const Json* v = f.optional("vertical_model")) vertical = boolean(*v, f.at("vertical_model"));

    std::vector<std::pair<std::string, plane::ProperLine>> leaves;
    const std::string lw = f.at("leaves");
    const Json& ls = array(f.required("leaves"), lw);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const std::string w = index(lw, i);
        Fields g(ls[i], w);
        std::string label = text(g.required("label"), g.at("label"));
        auto verts = points(g.required("vertices"), g.at("vertices"));
        g.finish();
        leaves.emplace_back(std::move(label), build(w, [&] { return plane::ProperLine(std::move(verts)); }));
    }
    auto chart = build(lw, [&] { return plane::FoliationChart(box, std::move(leaves), vertical); });

    ForcingScenario out{std::move(chart), {}, std::nullopt, {}, {}, {}, {}};
    if (const Json* m = f.optional("map")) out.map = read_planar_map(*m, f.at("map"));

    if (const Json* ps = f.optional("paths")) {
        const std::string pw = f.at("paths");
        array(*ps, pw);
        for (std::size_t i = 0; i < ps->size(); ++i) {
            const std::string w = index(pw, i);
            Fields g((*ps)[i], w);
            std::string id = text(g.required("id"), g.at("id"));
            auto verts = points(g.required("vertices"), g.at("vertices"));
            std::string start = text(g.required("start"), g.at("start"));
            std::string end = text(g.required("end"), g.at("end"));
            std::optional<std::vector<std::string>> expected;
            if (const Json* c = g.optional("crossings")) {
                array(*c, g.at("crossings"));
                expected.emplace();
                for (std::size_t k = 0; k < c->size(); ++k)
                    expected->push_back(text((*c)[k], index(g.at("crossings"), k)));
            }
            g.finish();
            for (const auto& [other, p] : out.paths)
                if (other == id) fail(g.at("id"), "duplicate path id '" + id + "'");
            auto path = build(w, [&] {
                return plane::make_transverse_path(std::move(verts), start, end, out.chart, expected);
            });
            out.paths.emplace_back(std::move(id), std::move(path));
        }
    }

    if (const Json* fs = f.optional("facts")) {
        const std::string fw = f.at("facts");
        array(*fs, fw);
        for (std::size_t i = 0; i < fs->size(); ++i) {
            const std::string w = index(fw, i);
            Fields g((*fs)[i], w);
            FactSpec spec;
            spec.path = text(g.required("path"), g.at("path"));
            const auto order = integer(g.required("order"), g.at("order"));
            if (order < 1 || order > 1'000'000) fail(g.at("order"), "order must be in [1, 1000000]");
            spec.order = static_cast<int>(order);
            if (const Json* p = g.optional("provenance")) {
                const std::string kind = text(*p, g.at("provenance"));
                if (kind == "given")
                    spec.provenance = plane::Provenance::Kind::given;
                else if (kind == "geometric-check")
                    spec.provenance = plane::Provenance::Kind::geometric_check;
                else
                    fail(g.at("provenance"), "expected \"given\" or \"geometric-check\"");
            }
            g.finish();
            build(g.at("path"), [&] { return out.path(spec.path).length(); });
            if (spec.provenance == plane::Provenance::Kind::geometric_check && !out.map)
                fail(g.at("provenance"), "geometric-check facts need a \"map\"");
            out.facts.push_back(spec);
        }
    }

    if (const Json* q = f.optional("queries")) {
        Fields g(*q, f.at("queries"));
        auto labels = [&](const Json& j, const std::string& w, std::size_t n) {
            array(j, w);
            if (j.size() != n) fail(w, "expected " + std::to_string(n) + " names");
            std::vector<std::string> v;
            for (std::size_t k = 0; k < n; ++k) v.push_back(text(j[k], index(w, k)));
            return v;
        };
        if (const Json* a = g.optional("above")) {
            array(*a, g.at("above"));
            for (std::size_t i = 0; i < a->size(); ++i) {
                const std::string w = index(g.at("above"), i);
                auto v = labels((*a)[i], w, 3);
                for (const auto& l : v) build(w, [&] { return out.chart.leaf(l).chain_length(); });
                out.above_queries.push_back({v[0], v[1], v[2]});
            }
        }
        if (const Json* a = g.optional("brouwer")) {
            array(*a, g.at("brouwer"));
            if (!out.map) fail(g.at("brouwer"), "Brouwer queries need a \"map\"");
            for (std::size_t i = 0; i < a->size(); ++i) {
                const std::string w = index(g.at("brouwer"), i);
                std::string l = text((*a)[i], w);
                build(w, [&] { return out.chart.leaf(l).chain_length(); });
                out.brouwer_queries.push_back(std::move(l));
            }
        }
        if (const Json* a = g.optional("intersections")) {
            array(*a, g.at("intersections"));
            for (std::size_t i = 0; i < a->size(); ++i) {
                const std::string w = index(g.at("intersections"), i);
                auto v = labels((*a)[i], w, 2);
                for (const auto& id : v) build(w, [&] { return out.path(id).length(); });
                out.intersection_queries.push_back({v[0], v[1]});
            }
        }
        g.finish();
    }
    f.finish();
    return out;
}

}  // namespace forcekit::scenario
