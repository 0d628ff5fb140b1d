// slicesim: topology generation, single solves, density sweeps and handover
// trace validation. Exit status 0 on success, 1 on a domain error (error name
// first on stderr), 2 on a usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "slicing/channel.hpp"
#include "slicing/error.hpp"
#include "slicing/handover.hpp"
#include "slicing/json_io.hpp"
#include "slicing/metrics.hpp"
#include "slicing/report.hpp"
#include "slicing/scenario.hpp"

namespace fs = std::filesystem;
using namespace slicing;

namespace {

struct Options {
    std::string config_path;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed;
    bool dump_gains = false;
    std::string trace_path;
    std::string emit_canonical;
};

RunConfig resolve(const Options& opt) {
    RunConfig config = opt.config_path.empty() ? RunConfig{} : load_run_config(opt.config_path);
    if (opt.seed) config.scenario.seed = *opt.seed;
    config.validate();
    return config;
}

fs::path prepare_output(const Options& opt) {
    const fs::path dir(opt.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& config) {
    write_text_file(dir / "run-manifest.json", dump(make_manifest(command, config)));
}

int cmd_generate(const Options& opt) {
    const RunConfig config = resolve(opt);
    const fs::path dir = prepare_output(opt);
    const Topology topology = generate_topology(config.scenario);
    write_text_file(dir / "topology.json", dump(to_json(topology)));
    if (opt.dump_gains) {
        std::ostringstream csv;
        write_gain_csv(build_gain_tensor(topology, config.scenario), csv);
        write_text_file(dir / "gains.csv", csv.str());
    }
    write_manifest(dir, "generate", config);
    std::cout << "small cells: " << topology.small_cells.size() << ", users: " << topology.users.size() << '\n';
    return 0;
}

int cmd_solve(const Options& opt) {
    const RunConfig config = resolve(opt);
    const fs::path dir = prepare_output(opt);
    const Topology topology = generate_topology(config.scenario);
    const GainTensor gains = build_gain_tensor(topology, config.scenario);
    if (opt.dump_gains) {
        std::ostringstream csv;
        write_gain_csv(gains, csv);
        write_text_file(dir / "gains.csv", csv.str());
    }
    const FixedPointResult r = interference_fixed_point(topology, gains, config.scenario, config.network);
    Json doc = to_json(r.problem, r.solve);
    doc["capacity_bps"] = {{"eMBB", r.capacity.embb_bps}, {"uRLLC", r.capacity.urllc_bps}, {"IoT", r.capacity.iot_bps}};
    write_text_file(dir / "allocation.json", dump(doc));
    write_text_file(dir / "feasibility.json", dump(to_json(r.solve.diagnostics.residuals)));
    write_manifest(dir, "solve", config);
    std::cout << "eMBB " << r.capacity.embb_bps << " bps, uRLLC " << r.capacity.urllc_bps << " bps, IoT "
              << r.capacity.iot_bps << " bps, feasible " << (r.solve.diagnostics.residuals.feasible ? "yes" : "no")
              << '\n';
    return 0;
}

int cmd_sweep(const Options& opt) {
    RunConfig config = resolve(opt);
    if (opt.seed) config.sweep.seeds = {*opt.seed};
    const fs::path dir = prepare_output(opt);
    const SweepResult r = run_sweep(config.scenario, config.sweep, config.network);
    if (r.reports.empty()) throw Error(ErrorKind::InvalidConfig, "every sweep job failed");
    write_report(r.reports, dir / "capacity.csv");
    write_svg_charts(r.reports, dir);
    write_manifest(dir, "sweep", config);
    std::cout << r.reports.size() << " rows, " << r.failures.size() << " failed jobs\n";
    return 0;
}

int cmd_handover(const Options& opt) {
    if (!opt.emit_canonical.empty())
        write_text_file(opt.emit_canonical, dump(to_json(handover::canonical_trace())));
    if (opt.trace_path.empty()) return 0;
    const auto events = events_from_json(read_json_file(opt.trace_path));
    const handover::TraceResult r = handover::run_trace(events);
    if (r.error) {
        std::cerr << r.error->message << " (event " << r.error->index << ")\n";
        return 1;
    }
    std::cout << "phase: " << handover::phase_name(r.state.phase()) << " after " << r.state.history.size()
              << " events\n";
    return r.complete() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network-slicing resource allocation simulator", "slicesim"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&opt](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "JSON config document")->check(CLI::ExistingFile);
        cmd->add_option("--output-dir", opt.output_dir, "Directory for outputs");
        cmd->add_option("--seed", opt.seed, "Override the scenario seed");
    };
    CLI::App* generate = app.add_subcommand("generate", "Write a topology JSON");
    common(generate);
    generate->add_flag("--dump-gains", opt.dump_gains, "Also write the gain tensor as CSV");
    CLI::App* solve = app.add_subcommand("solve", "Run one interference fixed point and write the allocation");
    common(solve);
    solve->add_flag("--dump-gains", opt.dump_gains, "Also write the gain tensor as CSV");
    CLI::App* sweep = app.add_subcommand("sweep", "Sweep the small-cell density and write CSV and SVG");
    common(sweep);
    CLI::App* trace = app.add_subcommand("handover-trace", "Validate a handover event trace");
    trace->add_option("trace", opt.trace_path, "JSON array of events")->check(CLI::ExistingFile);
    trace->add_option("--emit-canonical", opt.emit_canonical, "Write the canonical trace to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        std::cerr << app.help();
        return 2;
    }
    if (trace->parsed() && opt.trace_path.empty() && opt.emit_canonical.empty()) {
        std::cerr << "handover-trace needs a trace file or --emit-canonical\n" << trace->help();
        return 2;
    }

    try {
        if (generate->parsed()) return cmd_generate(opt);
        if (solve->parsed()) return cmd_solve(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        return cmd_handover(opt);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "IoError: " << e.what() << '\n';
        return 1;
    }
}
