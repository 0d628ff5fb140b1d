#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "slicing/error.hpp"
#include "slicing/json_io.hpp"

using namespace slicing;

namespace {

ErrorKind kind_of_parse(const Json& doc) {
    try {
        run_config_from_json(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;  // sentinel: parsed fine
}

}  // namespace

TEST_CASE("config defaults and round trip") {
    const RunConfig defaults = run_config_from_json(Json::object());
    CHECK(defaults == RunConfig{});
    CHECK(run_config_from_json(to_json(defaults)) == defaults);

    RunConfig c;
    c.scenario.num_small_cells = 7;
    c.scenario.seed = 1234567890123ULL;
    c.scenario.urllc_min_rate_bps = 3.3e5;
    c.network.rounds = 2;
    c.network.solver.price_rule = PriceRule::Additive;
    c.network.solver.max_iters = 77;
    c.sweep.small_cell_counts = {5, 15};
    c.sweep.seeds = {4, 8};
    CHECK(run_config_from_json(to_json(c)) == c);
    CHECK(run_config_from_json(Json::parse(dump(to_json(c)))) == c);
}

TEST_CASE("config rejects bad documents") {
    CHECK(kind_of_parse(Json::array()) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"scenario", {{"num_cells", 3}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"extras", Json::object()}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"scenario", {{"num_small_cells", 2.5}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"scenario", {{"num_small_cells", -1}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"scenario", {{"seed", -1}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"scenario", {{"macro_radius_m", "big"}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"solver", {{"price_rule", "newton"}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"solver", {{"max_iters", 0}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"network", {{"damping", 1.5}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"sweep", {{"seeds", Json::array()}}}}) == ErrorKind::InvalidConfig);
    CHECK(kind_of_parse({{"sweep", {{"num_small_cells", {1, -2}}}}}) == ErrorKind::InvalidConfig);
}

TEST_CASE("config files") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "slicing_test_json";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "bad.json") << "{ not json";
        std::ofstream(dir / "ok.json") << R"({"scenario": {"num_small_cells": 3}})";
    }
    CHECK(load_run_config(dir / "ok.json").scenario.num_small_cells == 3);
    try {
        load_run_config(dir / "bad.json");
        FAIL("expected InvalidConfig");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidConfig);
    }
    try {
        load_run_config(dir / "absent.json");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("trace documents") {
    const auto canonical = handover::canonical_trace("urllc");
    CHECK(events_from_json(to_json(canonical)) == canonical);
    const Json doc = Json::parse(R"([{"kind": "MeasurementReport", "actor": "user"}])");
    const auto events = events_from_json(doc);
    REQUIRE(events.size() == 1);
    CHECK(events[0].slice_id.empty());
    CHECK_THROWS_AS(events_from_json(Json::object()), Error);
    CHECK_THROWS_AS(events_from_json(Json::parse(R"([{"kind": "MeasurementReport"}])")), Error);
    CHECK_THROWS_AS(events_from_json(Json::parse(R"([{"kind": "Teleport", "actor": "user"}])")), Error);
    CHECK_THROWS_AS(events_from_json(Json::parse(R"([{"kind": "Timeout", "actor": "user", "x": "1"}])")),
                    Error);
}

TEST_CASE("manifest and result documents") {
    RunConfig c;
    c.scenario.seed = 42;
    const Json m = make_manifest("sweep", c);
    CHECK(m["command"] == "sweep");
    CHECK(m["seed"] == 42);
    CHECK(m["urllc_min_rate_bps"] == c.scenario.urllc_min_rate_bps);
    CHECK(run_config_from_json(m["config"]) == c);
    CHECK(dump(m).back() == '\n');

    AllocationProblem p =
        AllocationProblem::with_layout({{Slice::uRLLC, Slice::eMBB}}, 2, 1e-15, 0.2, 1e-13, 200e3);
    p.macro_gain.assign(p.macro_gain.size(), 1e-14);
    const SolveResult r = solve_dual(p);
    const Json doc = to_json(p, r);
    CHECK(doc["users"].size() == 2);
    CHECK(doc["nu"].size() == 2);
    CHECK(doc["feasibility"]["feasible"] == r.diagnostics.residuals.feasible);
    CHECK(doc["diagnostics"]["iterations"] == r.diagnostics.iterations);
    int assigned = 0;
    for (std::size_t i = 0; i < r.allocation.assign.size(); ++i) assigned += r.allocation.assign[i];
    CHECK(doc["assignments"].size() == static_cast<std::size_t>(assigned));
}

TEST_CASE("topology document") {
    ScenarioConfig c;
    c.num_small_cells = 2;
    const Topology t = generate_topology(c);
    const Json doc = to_json(t);
    CHECK(doc["small_cells"].size() == 2);
    CHECK(doc["users"].size() == t.users.size());
    CHECK(doc["users"][0]["attachment"] == "macro");
    CHECK(doc["users"][0]["slice"] == "IoT");
    CHECK(doc["users"][50]["attachment"] == 0);
}
