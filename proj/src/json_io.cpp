#include "slicing/json_io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "slicing/error.hpp"

namespace slicing {

namespace {

using Setter = std::function<void(const Json&)>;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

template <class T>
Setter number(T& field, const std::string& key) {
    return [&field, key](const Json& v) {
        if (!v.is_number()) invalid("'" + key + "' must be a number");
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() && !v.is_number_unsigned()) invalid("'" + key + "' must be an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && v.get<long long>() < 0) invalid("'" + key + "' must be >= 0");
            }
        }
        field = v.get<T>();
    };
}

template <class T>
Setter list(std::vector<T>& field, const std::string& key) {
    return [&field, key](const Json& v) {
        if (!v.is_array()) invalid("'" + key + "' must be an array");
        std::vector<T> out;
        for (const Json& e : v) {
            if (!e.is_number_integer() && !e.is_number_unsigned()) invalid("'" + key + "' must hold integers");
            if (e.is_number_integer() && e.get<long long>() < 0) invalid("'" + key + "' must hold values >= 0");
            out.push_back(e.get<T>());
        }
        field = std::move(out);
    };
}

void apply(const Json& section, const std::string& name, const std::map<std::string, Setter>& setters) {
    if (!section.is_object()) invalid("section '" + name + "' must be an object");
    for (const auto& [key, value] : section.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) invalid("unknown key '" + name + "." + key + "'");
        it->second(value);
    }
}

const char* price_rule_name(PriceRule r) { return r == PriceRule::Geometric ? "geometric" : "additive"; }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json doubles(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(finite_or_null(x));
    return out;
}

}  // namespace

void RunConfig::validate() const {
    scenario.validate();
    network.validate();
    sweep.validate();
    const SolverParams& s = network.solver;
    if (s.max_iters < 1 || s.min_iters < 0 || !(s.step_scale > 0.0) || !(s.tolerance > 0.0) || s.polish_passes < 0)
        invalid("solver parameters out of range");
}

Json to_json(const RunConfig& c) {
    const ScenarioConfig& s = c.scenario;
    Json doc;
    doc["scenario"] = {
        {"macro_radius_m", s.macro_radius_m},
        {"small_cell_radius_m", s.small_cell_radius_m},
        {"min_small_cell_separation_m", s.min_small_cell_separation_m},
        {"num_small_cells", s.num_small_cells},
        {"users_per_small_cell", s.users_per_small_cell},
        {"num_macro_users", s.num_macro_users},
        {"carrier_frequency_hz", s.carrier_frequency_hz},
        {"total_bandwidth_hz", s.total_bandwidth_hz},
        {"num_subchannels", s.num_subchannels},
        {"max_tx_power_dbm", s.max_tx_power_dbm},
        {"interference_threshold_dbm", s.interference_threshold_dbm},
        {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
        {"urllc_min_rate_bps", s.urllc_min_rate_bps},
        {"urllc_fraction", s.urllc_fraction},
        {"urllc_weight", s.urllc_weight},
        {"seed", s.seed},
    };
    const SolverParams& p = c.network.solver;
    doc["solver"] = {
        {"max_iters", p.max_iters},   {"min_iters", p.min_iters},
        {"step_scale", p.step_scale}, {"tolerance", p.tolerance},
        {"price_rule", price_rule_name(p.price_rule)}, {"polish_passes", p.polish_passes},
    };
    doc["network"] = {{"rounds", c.network.rounds}, {"damping", c.network.damping}, {"ttis", c.network.ttis}};
    doc["sweep"] = {
        {"num_small_cells", c.sweep.small_cell_counts},
        {"users_per_small_cell", c.sweep.users_per_cell},
        {"seeds", c.sweep.seeds},
    };
    return doc;
}

RunConfig run_config_from_json(const Json& doc) {
    if (!doc.is_object()) invalid("config must be a JSON object");
    RunConfig c;
    ScenarioConfig& s = c.scenario;
    SolverParams& p = c.network.solver;
    const std::map<std::string, std::map<std::string, Setter>> sections = {
        {"scenario",
         {
             {"macro_radius_m", number(s.macro_radius_m, "macro_radius_m")},
             {"small_cell_radius_m", number(s.small_cell_radius_m, "small_cell_radius_m")},
             {"min_small_cell_separation_m", number(s.min_small_cell_separation_m, "min_small_cell_separation_m")},
             {"num_small_cells", number(s.num_small_cells, "num_small_cells")},
             {"users_per_small_cell", number(s.users_per_small_cell, "users_per_small_cell")},
             {"num_macro_users", number(s.num_macro_users, "num_macro_users")},
             {"carrier_frequency_hz", number(s.carrier_frequency_hz, "carrier_frequency_hz")},
             {"total_bandwidth_hz", number(s.total_bandwidth_hz, "total_bandwidth_hz")},
             {"num_subchannels", number(s.num_subchannels, "num_subchannels")},
             {"max_tx_power_dbm", number(s.max_tx_power_dbm, "max_tx_power_dbm")},
             {"interference_threshold_dbm", number(s.interference_threshold_dbm, "interference_threshold_dbm")},
             {"noise_psd_dbm_hz", number(s.noise_psd_dbm_hz, "noise_psd_dbm_hz")},
             {"urllc_min_rate_bps", number(s.urllc_min_rate_bps, "urllc_min_rate_bps")},
             {"urllc_fraction", number(s.urllc_fraction, "urllc_fraction")},
             {"urllc_weight", number(s.urllc_weight, "urllc_weight")},
             {"seed", number(s.seed, "seed")},
         }},
        {"solver",
         {
             {"max_iters", number(p.max_iters, "max_iters")},
             {"min_iters", number(p.min_iters, "min_iters")},
             {"step_scale", number(p.step_scale, "step_scale")},
             {"tolerance", number(p.tolerance, "tolerance")},
             {"polish_passes", number(p.polish_passes, "polish_passes")},
             {"price_rule",
              [&p](const Json& v) {
                  if (v == "geometric") p.price_rule = PriceRule::Geometric;
                  else if (v == "additive") p.price_rule = PriceRule::Additive;
                  else invalid("'price_rule' must be \"geometric\" or \"additive\"");
              }},
         }},
        {"network",
         {
             {"rounds", number(c.network.rounds, "rounds")},
             {"damping", number(c.network.damping, "damping")},
             {"ttis", number(c.network.ttis, "ttis")},
         }},
        {"sweep",
         {
             {"num_small_cells", list(c.sweep.small_cell_counts, "num_small_cells")},
             {"users_per_small_cell", list(c.sweep.users_per_cell, "users_per_small_cell")},
             {"seeds", list(c.sweep.seeds, "seeds")},
         }},
    };
    for (const auto& [name, section] : doc.items()) {
        const auto it = sections.find(name);
        if (it == sections.end()) invalid("unknown section '" + name + "'");
        apply(section, name, it->second);
    }
    c.validate();
    return c;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        invalid(path.string() + ": " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(read_json_file(path)); }

Json to_json(const Topology& t) {
    Json doc;
    doc["macro"] = {{"x", t.macro_position.x}, {"y", t.macro_position.y}};
    Json cells = Json::array();
    for (const SmallCell& c : t.small_cells) cells.push_back({{"id", c.id}, {"x", c.center.x}, {"y", c.center.y}});
    doc["small_cells"] = std::move(cells);
    Json users = Json::array();
    for (const User& u : t.users) {
        users.push_back({
            {"id", u.id},
            {"x", u.position.x},
            {"y", u.position.y},
            {"attachment", u.on_macro() ? Json("macro") : Json(u.cell)},
            {"slice", std::string(slice_name(u.slice))},
            {"indoor", u.indoor},
        });
    }
    doc["users"] = std::move(users);
    return doc;
}

Json to_json(const FeasibilityReport& r) {
    return {
        {"feasible", r.feasible},
        {"power_slack_w", doubles(r.power_slack_w)},
        {"rate_slack_bps", doubles(r.rate_slack_bps)},
        {"interference_slack_w", doubles(r.interference_slack_w)},
        {"exclusivity_violations", r.exclusivity_violations},
        {"unassigned_power", r.unassigned_power},
        {"max_rate_mismatch", r.max_rate_mismatch},
    };
}

Json to_json(const AllocationProblem& problem, const SolveResult& result) {
    const Allocation& a = result.allocation;
    Json assignments = Json::array();
    for (int k = 0; k < problem.num_cells; ++k)
        for (int n = 0; n < problem.num_subchannels; ++n)
            for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s)
                if (a.assigned(s, n))
                    assignments.push_back({{"cell", k},
                                           {"subchannel", n},
                                           {"user", problem.slots[s].user_id},
                                           {"power_w", a.power[a.at(s, n)]}});
    Json users = Json::array();
    for (int s = 0; s < problem.num_slots(); ++s) {
        const SlotInfo& info = problem.slots[s];
        users.push_back({{"user", info.user_id},
                         {"cell", info.cell},
                         {"slice", std::string(slice_name(info.slice))},
                         {"rate_bps", a.rate_bps[s]},
                         {"min_rate_bps", info.min_rate_bps},
                         {"lambda", result.duals.lambda[s]},
                         {"mu", result.duals.mu[s]}});
    }
    const SolveDiagnostics& d = result.diagnostics;
    Json doc;
    doc["assignments"] = std::move(assignments);
    doc["users"] = std::move(users);
    doc["nu"] = doubles(result.duals.nu);
    doc["diagnostics"] = {
        {"iterations", d.iterations},
        {"converged", d.converged},
        {"found_feasible", d.found_feasible},
        {"weak_duality_held", d.weak_duality_held},
        {"best_dual", finite_or_null(d.best_dual)},
        {"best_primal", finite_or_null(d.best_primal)},
        {"dual_values", doubles(d.dual_values)},
        {"primal_values", doubles(d.primal_values)},
    };
    doc["feasibility"] = to_json(d.residuals);
    return doc;
}

Json to_json(const std::vector<handover::HandoverEvent>& events) {
    Json out = Json::array();
    for (const auto& e : events)
        out.push_back({{"kind", std::string(handover::kind_name(e.kind))},
                       {"actor", std::string(handover::actor_name(e.actor))},
                       {"slice_id", e.slice_id}});
    return out;
}

std::vector<handover::HandoverEvent> events_from_json(const Json& doc) {
    if (!doc.is_array()) invalid("a trace must be a JSON array of events");
    std::vector<handover::HandoverEvent> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const Json& e = doc[i];
        const std::string at = "event " + std::to_string(i);
        if (!e.is_object()) invalid(at + " must be an object");
        for (const auto& [key, value] : e.items()) {
            if (key != "kind" && key != "actor" && key != "slice_id") invalid(at + ": unknown key '" + key + "'");
            if (!value.is_string()) invalid(at + ": '" + key + "' must be a string");
        }
        if (!e.contains("kind") || !e.contains("actor")) invalid(at + " needs 'kind' and 'actor'");
        out.push_back({handover::parse_kind(e["kind"].get<std::string>()),
                       handover::parse_actor(e["actor"].get<std::string>()),
                       e.value("slice_id", std::string())});
    }
    return out;
}

Json make_manifest(const std::string& command, const RunConfig& config) {
    Json doc;
    doc["command"] = command;
    doc["seed"] = config.scenario.seed;
    doc["urllc_min_rate_bps"] = config.scenario.urllc_min_rate_bps;
    doc["config"] = to_json(config);
    return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace slicing
