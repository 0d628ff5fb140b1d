#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "slicing_test_cli";

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Run slicesim(const std::string& args, const std::string& env = "") {
    const fs::path out = kWork / "stdout.txt", err = kWork / "stderr.txt";
    const std::string cmd = env + " '" + std::string(SLICESIM_PATH) + "' " + args + " >'" + out.string() + "' 2>'" +
                            err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read(out);
    r.err = read(err);
    return r;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Ten 200 kHz subchannels instead of fifty keep the runs short.
const char* kSmallConfig = R"({
  "scenario": {"num_small_cells": 4, "num_subchannels": 10, "total_bandwidth_hz": 2000000.0},
  "sweep": {"num_small_cells": [0, 3, 6, 9, 12]}
})";

struct Workspace {
    Workspace() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
        write(kWork / "small.json", kSmallConfig);
    }
};

}  // namespace

TEST_CASE_FIXTURE(Workspace, "usage errors exit 2") {
    Run r = slicesim("");
    CHECK(r.status == 2);
    r = slicesim("frobnicate");
    CHECK(r.status == 2);
    CHECK(r.err.find("generate") != std::string::npos);
    CHECK(r.err.find("handover-trace") != std::string::npos);
    CHECK(slicesim("solve --bogus").status == 2);
    CHECK(slicesim("--help").status == 0);
}

TEST_CASE_FIXTURE(Workspace, "handover traces") {
    const fs::path canonical = kWork / "canonical.json";
    REQUIRE(slicesim("handover-trace --emit-canonical '" + canonical.string() + "'").status == 0);
    Run r = slicesim("handover-trace '" + canonical.string() + "'");
    CHECK(r.status == 0);
    CHECK(r.out.find("Complete") != std::string::npos);

    nlohmann::json doc = nlohmann::json::parse(read(canonical));
    std::swap(doc[2], doc[3]);
    write(kWork / "swapped.json", doc.dump());
    r = slicesim("handover-trace '" + (kWork / "swapped.json").string() + "'");
    CHECK(r.status == 1);
    CHECK(r.err.rfind("IllegalTransition", 0) == 0);
    CHECK(r.err.find("event 2") != std::string::npos);

    doc = nlohmann::json::parse(read(canonical));
    doc.erase(doc.size() - 1);
    write(kWork / "partial.json", doc.dump());
    CHECK(slicesim("handover-trace '" + (kWork / "partial.json").string() + "'").status == 1);

    write(kWork / "garbage.json", "[{\"kind\": 3}]");
    r = slicesim("handover-trace '" + (kWork / "garbage.json").string() + "'");
    CHECK(r.status == 1);
    CHECK(r.err.rfind("InvalidConfig", 0) == 0);
    CHECK(slicesim("handover-trace").status == 2);
}

TEST_CASE_FIXTURE(Workspace, "generate and solve") {
    const std::string cfg = "--config '" + (kWork / "small.json").string() + "'";
    const fs::path gen = kWork / "gen";
    Run r = slicesim("generate " + cfg + " --seed 9 --dump-gains --output-dir '" + gen.string() + "'");
    REQUIRE(r.status == 0);
    const auto topo = nlohmann::json::parse(read(gen / "topology.json"));
    CHECK(topo["small_cells"].size() == 4);
    CHECK(fs::exists(gen / "gains.csv"));
    const auto manifest = nlohmann::json::parse(read(gen / "run-manifest.json"));
    CHECK(manifest["command"] == "generate");
    CHECK(manifest["seed"] == 9);
    CHECK(manifest["config"]["scenario"]["seed"] == 9);
    CHECK(manifest.contains("urllc_min_rate_bps"));

    const fs::path sol = kWork / "solve";
    r = slicesim("solve " + cfg + " --output-dir '" + sol.string() + "'");
    REQUIRE(r.status == 0);
    const auto alloc = nlohmann::json::parse(read(sol / "allocation.json"));
    CHECK(alloc["capacity_bps"]["eMBB"].get<double>() > 0.0);
    CHECK(alloc["feasibility"]["feasible"] == true);
    CHECK(nlohmann::json::parse(read(sol / "feasibility.json"))["feasible"] == true);

    // The vector kernels must not change a single output byte.
    const fs::path scalar = kWork / "solve_scalar";
    REQUIRE(slicesim("solve " + cfg + " --output-dir '" + scalar.string() + "'", "SLICE_ALLOC_SIMD=scalar").status ==
            0);
    CHECK(read(scalar / "allocation.json") == read(sol / "allocation.json"));

    // Inputs are left alone.
    CHECK(read(kWork / "small.json") == kSmallConfig);
}

TEST_CASE_FIXTURE(Workspace, "domain errors exit 1") {
    write(kWork / "bad.json", R"({"scenario": {"num_small_cells": -3}})");
    Run r = slicesim("generate --config '" + (kWork / "bad.json").string() + "' --output-dir '" +
                     (kWork / "x").string() + "'");
    CHECK(r.status == 1);
    CHECK(r.err.rfind("InvalidConfig", 0) == 0);
    write(kWork / "crowded.json", R"({"scenario": {"num_small_cells": 50, "min_small_cell_separation_m": 200.0}})");
    r = slicesim("generate --config '" + (kWork / "crowded.json").string() + "' --output-dir '" +
                 (kWork / "y").string() + "'");
    CHECK(r.status == 1);
    CHECK(r.err.rfind("PlacementInfeasible", 0) == 0);
}

TEST_CASE_FIXTURE(Workspace, "sweep writes one row per point and slice") {
    const fs::path dir = kWork / "sweep";
    const Run r = slicesim("sweep --config '" + (kWork / "small.json").string() + "' --seed 1 --output-dir '" +
                           dir.string() + "'");
    REQUIRE(r.status == 0);
    std::istringstream csv(read(dir / "capacity.csv"));
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 31);
    for (const char* slice : {"eMBB", "uRLLC", "IoT"}) CHECK(fs::exists(dir / ("capacity_" + std::string(slice) + ".svg")));
    const auto manifest = nlohmann::json::parse(read(dir / "run-manifest.json"));
    CHECK(manifest["config"]["sweep"]["seeds"] == nlohmann::json::array({1}));
}
