#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "slicing/allocator.hpp"
#include "slicing/handover.hpp"
#include "slicing/metrics.hpp"
#include "slicing/scenario.hpp"

namespace slicing {

using Json = nlohmann::ordered_json;

// Everything a command needs. JSON sections "scenario", "solver", "network"
// and "sweep"; absent keys keep their defaults, unknown keys are rejected.
struct RunConfig {
    ScenarioConfig scenario;
    NetworkParams network;
    SweepSpec sweep;

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& doc);  // Error(InvalidConfig)
RunConfig load_run_config(const std::filesystem::path& path);  // Error(Io) or Error(InvalidConfig)

Json to_json(const Topology& topology);

// Assignment triples with powers, per-user rates, multipliers, per-iteration
// dual and primal values and the feasibility residuals.
Json to_json(const AllocationProblem& problem, const SolveResult& result);
Json to_json(const FeasibilityReport& report);

Json to_json(const std::vector<handover::HandoverEvent>& events);
std::vector<handover::HandoverEvent> events_from_json(const Json& doc);  // Error(InvalidConfig)

// Resolved configuration and seed of a run; no timestamps or host details so
// equal runs write equal manifests.
Json make_manifest(const std::string& command, const RunConfig& config);

std::string dump(const Json& doc);  // two-space indent, trailing newline

Json read_json_file(const std::filesystem::path& path);  // Error(Io) or Error(InvalidConfig)

}  // namespace slicing
