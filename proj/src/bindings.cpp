#include "forcekit/cli.hpp"
#include "forcekit/interval.hpp"
#include "forcekit/plane.hpp"
#include "forcekit/rotation.hpp"
#include "forcekit/scenario.hpp"
#include "forcekit/symbolic.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace forcekit;

namespace {

using Point = std::pair<double, double>;

geom::Vec2 to_vec(const Point& p) { return {p.first, p.second}; }
Point to_point(geom::Vec2 v) { return {v.x, v.y}; }

std::vector<geom::Vec2> to_vecs(const std::vector<Point>& ps) {
    std::vector<geom::Vec2> out;
    for (const auto& p : ps) out.push_back(to_vec(p));
    return out;
}

geom::Box to_box(const std::pair<Point, Point>& b) { return {to_vec(b.first), to_vec(b.second)}; }

py::int_ to_pyint(const BigInt& n) { return py::module_::import("builtins").attr("int")(n.str()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Forcing-theory toolkit";
    m.attr("__version__") = cli::kVersion;

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<LimitError>(m, "LimitError", PyExc_OverflowError);
    py::register_exception<DeductionError>(m, "DeductionError", PyExc_RuntimeError);
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    // symbolic
    py::class_<symbolic::TransitionMatrix>(m, "TransitionMatrix")
        .def(py::init<std::vector<std::vector<std::int64_t>>, std::vector<std::string>>(), py::arg("rows"),
             py::arg("labels") = std::vector<std::string>{})
        .def_static("fibonacci", &symbolic::TransitionMatrix::fibonacci)
        .def_static("full_shift", &symbolic::TransitionMatrix::full_shift, py::arg("q"))
        .def_property_readonly("size", &symbolic::TransitionMatrix::size)
        .def_property_readonly("labels", &symbolic::TransitionMatrix::labels)
        .def_property_readonly("rows", &symbolic::TransitionMatrix::rows);

    m.def("count_periodic_points",
          [](const symbolic::TransitionMatrix& a, int p) { return to_pyint(symbolic::count_periodic_points(a, p)); },
          py::arg("matrix"), py::arg("period"));
    m.def("topological_entropy", &symbolic::topological_entropy, py::arg("matrix"));
    m.def("is_admissible",
          [](const symbolic::TransitionMatrix& a, const std::string& w) {
              return symbolic::is_admissible(symbolic::Word::parse(w, a), a);
          },
          py::arg("matrix"), py::arg("word"));
    m.def(
        "periodic_words",
        [](const symbolic::TransitionMatrix& a, int p) {
            std::vector<std::pair<std::string, std::size_t>> out;
            for (const auto& w : symbolic::periodic_words(a, p)) out.emplace_back(w.spell(a), w.minimal_period());
            return out;
        },
        py::arg("matrix"), py::arg("period"));

    // interval
    m.def(
        "forced_periodic_orbits",
        [](const std::vector<std::pair<std::string, std::string>>& breakpoints, int max_period) {
            std::vector<interval::PLMap::Breakpoint> pts;
            std::vector<Rational> ends;
            for (const auto& [x, y] : breakpoints) {
                pts.push_back({parse_rational(x), parse_rational(y)});
                ends.push_back(pts.back().x);
            }
            const interval::PLMap f(pts);
            const interval::IntervalPartition part(ends);
            const auto graph = interval::build_covering_graph(f, part);
            const auto labels = graph.adjacency();
            py::list out;
            for (const auto& c : interval::forced_minimal_periods(graph, f, part, max_period)) {
                py::dict d;
                d["period"] = c.period;
                d["itinerary"] = c.itinerary.spell(labels);
                d["point"] = to_string(c.point.x);
                std::vector<std::string> orbit;
                for (const auto& x : c.point.orbit) orbit.push_back(to_string(x));
                d["orbit"] = orbit;
                d["boundary"] = c.point.boundary;
                out.append(d);
            }
            return out;
        },
        py::arg("breakpoints"), py::arg("max_period"));

    // rotation
    py::class_<rotation::TorusLift>(m, "TorusLift")
        .def_static("translation", [](const Point& v) { return rotation::TorusLift::translation(to_vec(v)); })
        .def_static(
            "from_json",
            [](const std::string& text) { return scenario::read_rotation(scenario::parse(text, "<python>")); },
            py::arg("text"))
        .def("__call__", [](const rotation::TorusLift& g, const Point& z) { return to_point(g(to_vec(z))); })
        .def("power", &rotation::TorusLift::power, py::arg("k"));

    m.def(
        "rotation_set",
        [](const rotation::TorusLift& g, int grid, int steps, int skip) {
            std::vector<Point> out;
            for (const auto& v : rotation::rotation_set_estimate(g, {grid, skip, steps}).vertices)
                out.push_back(to_point(v));
            return out;
        },
        py::arg("lift"), py::arg("grid") = 64, py::arg("steps") = 256, py::arg("skip") = 0);
    m.def(
        "find_periodic",
        [](const rotation::TorusLift& g, std::array<std::int64_t, 2> p, int q, const std::pair<Point, Point>& box) {
            const auto r = rotation::find_periodic(g, p, q, to_box(box));
            py::dict d;
            d["method"] = r.method;
            d["point"] = r.point ? py::cast(to_point(*r.point)) : py::none();
            d["residual"] = r.residual;
            std::vector<int> degrees;
            for (const auto& c : r.certificates) degrees.push_back(c.degree);
            d["degrees"] = degrees;
            return d;
        },
        py::arg("lift"), py::arg("p"), py::arg("q"), py::arg("box"));
    m.def(
        "deviation_profile",
        [](const rotation::TorusLift& g, int grid, int steps, const std::vector<int>& n_list, int skip) {
            const auto rho = rotation::rotation_set_estimate(g, {grid, skip, steps});
            std::vector<std::pair<int, double>> out;
            for (const auto& e : rotation::deviation_profile(g, rho, grid, n_list)) out.emplace_back(e.n, e.deviation);
            return out;
        },
        py::arg("lift"), py::arg("grid"), py::arg("steps"), py::arg("n_list"), py::arg("skip") = 0);

    // plane
    py::class_<plane::ProperLine>(m, "ProperLine")
        .def(py::init([](const std::vector<Point>& v) { return plane::ProperLine(to_vecs(v)); }), py::arg("vertices"))
        .def("reversed", &plane::ProperLine::reversed);
    m.def(
        "side_of",
        [](const plane::ProperLine& l, const Point& z) { return plane::to_string(plane::side_of(l, to_vec(z))); },
        py::arg("line"), py::arg("point"));
    m.def(
        "is_above",
        [](const plane::ProperLine& phi2, const plane::ProperLine& phi1, const plane::ProperLine& phi,
           const std::pair<Point, Point>& box) { return plane::is_above(phi2, phi1, phi, to_box(box)); },
        py::arg("phi2"), py::arg("phi1"), py::arg("phi"), py::arg("box"));
    m.def(
        "is_brouwer_line",
        [](const plane::ProperLine& line, const std::string& map_json, const std::pair<Point, Point>& box) {
            const auto f = scenario::read_planar_map(scenario::Json::parse(map_json), "$");
            const auto r = plane::is_brouwer_line(line, f, to_box(box));
            return std::make_pair(plane::to_string(r.verdict), r.margin);
        },
        py::arg("line"), py::arg("map_json"), py::arg("box"));
    m.def("horseshoe_entropy_bound", &plane::horseshoe_entropy_bound, py::arg("q"));

    // command line
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            std::vector<std::string> full{"forcekit"};
            full.insert(full.end(), args.begin(), args.end());
            const int code = cli::dispatch(full, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
