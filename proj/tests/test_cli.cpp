#include "forcekit/cli.hpp"
#include "forcekit/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace forcekit;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "forcekit");
    std::ostringstream out, err;
    Run r;
    r.code = cli::dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string scen(const std::string& name) { return std::string(FORCEKIT_SOURCE_DIR) + "/scenarios/" + name; }

// Fresh scratch directory per test.
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("forcekit_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string drop_wall_clock(const std::string& s) {
    return std::regex_replace(s, std::regex("\"wall_clock_seconds\":\\s*[-0-9.eE+]+"), "\"wall_clock_seconds\":0");
}

}  // namespace

TEST_CASE("sft subcommand") {
    const auto r = run({"sft", "--matrix-file", scen("fib.json"), "--entropy"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.481212") != std::string::npos);

    const auto p = run({"sft", "--matrix-file", scen("fib.json"), "--period", "3", "--words"});
    CHECK(p.code == 0);
    CHECK(p.out.find("011,3") != std::string::npos);
    CHECK(p.out.find("111,1") != std::string::npos);
}

TEST_CASE("interval subcommand") {
    const auto r = run({"interval", "--map-file", scen("sharko.json"), "--max-period", "5"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "period,itinerary,point,orbit,boundary");
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "1,1,4/3,4/3,false");
    CHECK(rows[1] == "2,01,2/3,2/3;5/3,false");
    CHECK(rows[2] == "3,011,0,0;1;2,true");
    for (int i = 0; i < 5; ++i) CHECK(rows[static_cast<std::size_t>(i)].rfind(std::to_string(i + 1) + ",", 0) == 0);

    CHECK(run({"interval", "--map-file", scen("sharko.json"), "--max-period", "21"}).code == 1);
}

TEST_CASE("rotation subcommand") {
    const auto hull = run({"rotation", "--lift-file", scen("translation.json"), "--grid", "8", "--n", "16"});
    CHECK(hull.code == 0);
    CHECK(hull.out.rfind("x,y\n", 0) == 0);
    std::istringstream rows(hull.out.substr(4));
    double x = 0, y = 0;
    char comma = 0;
    rows >> x >> comma >> y;
    CHECK(std::abs(x - 0.3) < 1e-12);
    CHECK(std::abs(y - 0.7) < 1e-12);

    const auto fp = run({"rotation", "--lift-file", scen("coupled_shear.json"), "--find-periodic", "0", "0", "1"});
    CHECK(fp.code == 0);
    const auto j = scenario::Json::parse(fp.out);
    CHECK(j["method"] == "degree");
    CHECK(j["residual"].get<double>() < 1e-8);

    const auto m = run({"rotation", "--lift-file", scen("raised_cosine_shear.json"), "--measure", "--grid", "32"});
    CHECK(m.code == 0);
    const auto mj = scenario::Json::parse(m.out);
    CHECK(std::abs(mj["rotation_vector"][0].get<double>() - 0.5) < 1e-6);

    CHECK(run({"rotation", "--lift-file", scen("translation.json"), "--measure", "--deviation"}).code == 2);
}

TEST_CASE("forcing subcommand") {
    const auto r = run({"forcing", "--scenario-file", scen("brouwer_model.json"), "--derive", "10"});
    REQUIRE(r.code == 0);
    const auto j = scenario::Json::parse(r.out);
    int derived = 0;
    for (const auto& f : j["facts"]) {
        if (f["provenance"]["kind"] != "forcing-step") continue;
        ++derived;
        CHECK(f["order"] == 5);
        CHECK(f["geometric_check"] == "true");
    }
    CHECK(derived == 2);
    CHECK(j["manifest"]["scenario_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);

    const auto h = run({"forcing", "--scenario-file", scen("horseshoe.json"), "--certify", "2", "0", "1"});
    REQUIRE(h.code == 0);
    const auto hj = scenario::Json::parse(h.out);
    CHECK(std::abs(hj["certificate"]["entropy_lower_bound"].get<double>() - std::log(4.0) / 6) <= 1e-15);
}

TEST_CASE("exit codes and diagnostics") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"sft"}).code == 2);
    CHECK(run({"sft", "--matrix-file", "/nonexistent/m.json"}).code == 2);

    const auto dir = scratch("diag");
    const auto bad = write_file(dir, "bad.json", "{\n  \"kind\": \"sft\",\n  \"transition_matrix\": [[1, 1],\n    [1 0]]\n}\n");
    const auto r = run({"sft", "--matrix-file", bad.string(), "--entropy"});
    CHECK(r.code == 2);
    CHECK(r.err.find("bad.json:4:") != std::string::npos);

    const auto extra = write_file(dir, "extra.json", R"({"kind": "sft", "transition_matrix": [[1]], "colour": 3})");
    const auto e = run({"sft", "--matrix-file", extra.string(), "--entropy"});
    CHECK(e.code == 2);
    CHECK(e.err.find("colour") != std::string::npos);

    const auto wrong = write_file(dir, "wrong.json", R"({"kind": "interval", "breakpoints": [["0", "1"], ["1", "x"]]})");
    const auto w = run({"interval", "--map-file", wrong.string()});
    CHECK(w.code == 2);
    CHECK(w.err.find("$.breakpoints[1]") != std::string::npos);

    // A given geometric check that does not hold is a domain failure.
    auto doc = scenario::Json::parse(slurp(scen("brouwer_model.json")));
    doc["facts"][0]["order"] = 1;
    const auto lie = write_file(dir, "lie.json", doc.dump(2));
    CHECK(run({"forcing", "--scenario-file", lie.string()}).code == 1);
}

TEST_CASE("output directory, manifests and atomic writes") {
    const auto dir = scratch("out");
    const auto r = run({"--out-dir", dir.string(), "interval", "--map-file", scen("sharko.json"), "--max-period", "4"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "interval.csv"));
    REQUIRE(fs::exists(dir / "interval.csv.manifest.json"));
    const auto m = scenario::Json::parse(slurp(dir / "interval.csv.manifest.json"));
    CHECK(m["tool"] == "forcekit");
    CHECK(m["parameters"]["max_period"] == 4);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename().string().find(".tmp") == std::string::npos);

    cli::write_atomic((dir / "x.txt").string(), "first");
    cli::write_atomic((dir / "x.txt").string(), "second");
    CHECK(slurp(dir / "x.txt") == "second");
    cli::write_atomic((dir / "nested" / "x.txt").string(), "data");
    CHECK(slurp(dir / "nested" / "x.txt") == "data");
}

TEST_CASE("property: identical inputs give byte-identical outputs") {
    const std::vector<std::vector<std::string>> commands{
        {"sft", "--matrix-file", scen("fib.json"), "--entropy", "--period", "6", "--words"},
        {"interval", "--map-file", scen("sharko.json"), "--max-period", "7"},
        {"rotation", "--lift-file", scen("coupled_shear.json"), "--grid", "16", "--n", "32"},
        {"rotation", "--lift-file", scen("coupled_shear.json"), "--deviation", "--grid", "8", "--n", "64"},
        {"forcing", "--scenario-file", scen("brouwer_model.json"), "--derive", "10"},
        {"forcing", "--scenario-file", scen("fig5.json"), "--derive", "6"},
    };
    for (const auto& c : commands) {
        const auto a = run(c), b = run(c);
        CHECK(a.code == 0);
        CHECK(drop_wall_clock(a.out) == drop_wall_clock(b.out));
        // Thread count must not change results.
        auto threaded = c;
        threaded.insert(threaded.begin(), {"--threads", "3"});
        CHECK(drop_wall_clock(run(threaded).out) == drop_wall_clock(a.out));
    }
}
