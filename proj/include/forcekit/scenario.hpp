#pragma once

// Scenario files: strict JSON documents with a top-level "kind". Every parse
// or validation failure raises ScenarioError naming the line or field.

#include "forcekit/interval.hpp"
#include "forcekit/plane.hpp"
#include "forcekit/rotation.hpp"
#include "forcekit/symbolic.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forcekit::scenario {

using Json = nlohmann::ordered_json;

struct Document {
    std::string kind;
    Json body;
    std::string hash;  // FNV-1a 64 of the raw bytes, hex
    std::string origin;
};

std::string fnv1a_hex(std::string_view bytes);

Document parse(std::string_view text, const std::string& origin = "<memory>");
Document load(const std::string& path);

// Kind-specific readers. Each checks doc.kind and rejects unknown fields.
symbolic::TransitionMatrix read_sft(const Document& doc);

struct IntervalScenario {
    interval::PLMap map;
    interval::IntervalPartition partition;
};
IntervalScenario read_interval(const Document& doc);

rotation::TorusLift read_rotation(const Document& doc);

struct FactSpec {
    std::string path;
    int order = 1;
    plane::Provenance::Kind provenance = plane::Provenance::Kind::given;
};

struct ForcingScenario {
    plane::FoliationChart chart;
    std::vector<std::pair<std::string, plane::TransversePath>> paths;
    std::optional<plane::PlanarMap> map;
    std::vector<FactSpec> facts;
    std::vector<std::array<std::string, 3>> above_queries;  // phi2, phi1, phi
    std::vector<std::string> brouwer_queries;
    std::vector<std::array<std::string, 2>> intersection_queries;

    const plane::TransversePath& path(const std::string& id) const;
};
ForcingScenario read_forcing(const Document& doc);

// Builds the primitives shared by rotation lifts and planar maps.
plane::PlanarMap read_planar_map(const Json& composition, const std::string& where);

}  // namespace forcekit::scenario
