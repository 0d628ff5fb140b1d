#include "slicing/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slicing/error.hpp"
#include "slicing/units.hpp"

namespace slicing {

namespace {

void check(bool ok, ErrorKind kind, const std::string& what) {
    if (!ok) throw Error(kind, what);
}

}  // namespace

AllocationProblem AllocationProblem::with_layout(const std::vector<std::vector<Slice>>& cells,
                                                 int num_subchannels, double noise_w, double p_max_w,
                                                 double interference_cap_w, double bandwidth_hz) {
    AllocationProblem p;
    p.num_cells = static_cast<int>(cells.size());
    p.num_subchannels = num_subchannels;
    int id = 0;
    for (int k = 0; k < p.num_cells; ++k) {
        for (Slice s : cells[k]) p.slots.push_back({id++, k, s, 0.0});
        p.cell_offset.push_back(static_cast<int>(p.slots.size()));
    }
    const std::size_t per_slot = p.slots.size() * num_subchannels;
    const std::size_t per_cell = static_cast<std::size_t>(p.num_cells) * num_subchannels;
    p.own_gain.assign(per_slot, 1.0);
    p.macro_gain.assign(per_slot, 1.0);
    p.macro_interference.assign(per_cell, 0.0);
    p.co_tier_interference.assign(per_cell, 0.0);
    p.noise_w = noise_w;
    p.p_max_w = p_max_w;
    p.interference_cap_w = interference_cap_w;
    p.bandwidth_hz = bandwidth_hz;
    return p;
}

void AllocationProblem::validate() const {
    check(num_cells >= 0 && num_subchannels >= 1, ErrorKind::DimensionMismatch, "bad problem dimensions");
    check(static_cast<int>(cell_offset.size()) == num_cells + 1 && cell_offset.front() == 0 &&
              cell_offset.back() == num_slots(),
          ErrorKind::DimensionMismatch, "cell offsets inconsistent with slots");
    const std::size_t per_slot = slots.size() * num_subchannels;
    const std::size_t per_cell = static_cast<std::size_t>(num_cells) * num_subchannels;
    check(own_gain.size() == per_slot && macro_gain.size() == per_slot, ErrorKind::DimensionMismatch,
          "gain arrays inconsistent with slots x subchannels");
    check(macro_interference.size() == per_cell && co_tier_interference.size() == per_cell,
          ErrorKind::DimensionMismatch, "interference arrays inconsistent with cells x subchannels");
    for (int k = 0; k < num_cells; ++k) {
        check(cell_offset[k] <= cell_offset[k + 1], ErrorKind::DimensionMismatch, "cell offsets decrease");
        for (int s = slots_begin(k); s < slots_end(k); ++s)
            check(slots[s].cell == k, ErrorKind::DimensionMismatch, "slot assigned to wrong cell");
    }
    check(p_max_w > 0.0, ErrorKind::InvalidConfig, "p_max must be > 0");
    check(interference_cap_w > 0.0, ErrorKind::InvalidConfig, "interference cap must be > 0");
    check(noise_w > 0.0, ErrorKind::InvalidConfig, "noise must be > 0");
    check(bandwidth_hz > 0.0, ErrorKind::InvalidConfig, "bandwidth must be > 0");
    check(embb_weight >= 0.0 && urllc_weight >= 0.0, ErrorKind::InvalidConfig, "weights must be >= 0");
    for (const SlotInfo& s : slots)
        check(s.min_rate_bps >= 0.0, ErrorKind::InvalidConfig, "min rates must be >= 0");
    for (double v : co_tier_interference)
        check(v >= 0.0, ErrorKind::InvalidConfig, "co-tier interference must be >= 0");
    for (double v : macro_interference)
        check(v >= 0.0, ErrorKind::InvalidConfig, "macro interference must be >= 0");
    for (double g : own_gain) check(g >= 0.0 && std::isfinite(g), ErrorKind::InvalidConfig, "bad own gain");
    for (double g : macro_gain) check(g >= 0.0 && std::isfinite(g), ErrorKind::InvalidConfig, "bad macro gain");
}

Allocation Allocation::empty(const AllocationProblem& problem) {
    Allocation a;
    a.num_slots = problem.num_slots();
    a.num_subchannels = problem.num_subchannels;
    const std::size_t n = static_cast<std::size_t>(a.num_slots) * a.num_subchannels;
    a.assign.assign(n, 0);
    a.power.assign(n, 0.0);
    a.rate_bps.assign(a.num_slots, 0.0);
    return a;
}

DualState DualState::zero(const AllocationProblem& problem, double step_scale) {
    DualState d;
    d.lambda.assign(problem.num_slots(), 0.0);
    d.mu.assign(problem.num_slots(), 0.0);
    d.nu.assign(problem.num_subchannels, 0.0);
    d.step_scale = step_scale;
    return d;
}

void DualState::validate(const AllocationProblem& problem) const {
    check(static_cast<int>(lambda.size()) == problem.num_slots() &&
              static_cast<int>(mu.size()) == problem.num_slots() &&
              static_cast<int>(nu.size()) == problem.num_subchannels,
          ErrorKind::DimensionMismatch, "dual state inconsistent with problem");
    check(step_scale > 0.0, ErrorKind::InvalidConfig, "step_scale must be > 0");
    for (double v : lambda) check(v >= 0.0, ErrorKind::InvalidConfig, "lambda must be >= 0");
    for (double v : mu) check(v >= 0.0, ErrorKind::InvalidConfig, "mu must be >= 0");
    for (double v : nu) check(v >= 0.0, ErrorKind::InvalidConfig, "nu must be >= 0");
}

std::vector<double> macro_user_powers(const std::vector<int>& schedule, int num_macro_users, double p_max_w) {
    std::vector<int> held(num_macro_users, 0);
    for (int u : schedule) ++held[u];
    std::vector<double> power(num_macro_users, 0.0);
    for (int u = 0; u < num_macro_users; ++u)
        if (held[u] > 0) power[u] = p_max_w / held[u];
    return power;
}

std::vector<double> macro_interference_at_cells(const Topology& topo, const GainTensor& gains,
                                                const ScenarioConfig& config,
                                                const std::vector<std::vector<int>>& schedules) {
    const int cells = static_cast<int>(topo.small_cells.size());
    const int n_sub = config.num_subchannels;
    std::vector<double> out(static_cast<std::size_t>(cells) * n_sub, 0.0);
    if (config.num_macro_users == 0 || schedules.empty()) return out;
    const double p_max = dbm_to_watt(config.max_tx_power_dbm);
    for (const auto& schedule : schedules) {
        const std::vector<double> power = macro_user_powers(schedule, config.num_macro_users, p_max);
        for (int k = 0; k < cells; ++k) {
            for (int n = 0; n < n_sub; ++n) {
                const int u = schedule[n];
                out[static_cast<std::size_t>(k) * n_sub + n] +=
                    power[u] * gains.at(u, small_cell_station(k), n);
            }
        }
    }
    for (double& v : out) v /= static_cast<double>(schedules.size());
    return out;
}

AllocationProblem build_problem(const Topology& topo, const GainTensor& gains, const ScenarioConfig& config,
                                const std::vector<std::vector<int>>& schedules, std::span<const double> co_tier) {
    AllocationProblem p;
    p.num_cells = static_cast<int>(topo.small_cells.size());
    p.num_subchannels = config.num_subchannels;
    if (gains.num_subchannels() != config.num_subchannels || gains.num_stations() != p.num_cells + 1 ||
        gains.num_users() != static_cast<int>(topo.users.size())) {
        throw Error(ErrorKind::DimensionMismatch, "gain tensor does not match topology");
    }

    std::vector<std::vector<const User*>> members(p.num_cells);
    for (const User& u : topo.users)
        if (!u.on_macro()) members[u.cell].push_back(&u);
    for (int k = 0; k < p.num_cells; ++k) {
        std::sort(members[k].begin(), members[k].end(),
                  [](const User* a, const User* b) { return a->id < b->id; });
        for (const User* u : members[k]) {
            const double r_min = u->slice == Slice::uRLLC ? config.urllc_min_rate_bps : 0.0;
            p.slots.push_back({u->id, k, u->slice, r_min});
        }
        p.cell_offset.push_back(static_cast<int>(p.slots.size()));
    }

    const int n_sub = p.num_subchannels;
    p.own_gain.resize(p.slots.size() * n_sub);
    p.macro_gain.resize(p.slots.size() * n_sub);
    for (int s = 0; s < p.num_slots(); ++s) {
        const SlotInfo& info = p.slots[s];
        const auto own = gains.row(info.user_id, small_cell_station(info.cell));
        const auto macro = gains.row(info.user_id, macro_station());
        std::copy(own.begin(), own.end(), p.own_row(s).begin());
        std::copy(macro.begin(), macro.end(), p.macro_row(s).begin());
    }

    p.macro_interference = macro_interference_at_cells(topo, gains, config, schedules);
    const std::size_t per_cell = static_cast<std::size_t>(p.num_cells) * n_sub;
    if (co_tier.empty()) {
        p.co_tier_interference.assign(per_cell, 0.0);
    } else {
        if (co_tier.size() != per_cell)
            throw Error(ErrorKind::DimensionMismatch, "co-tier interference has wrong size");
        p.co_tier_interference.assign(co_tier.begin(), co_tier.end());
    }

    p.bandwidth_hz = config.subchannel_bandwidth_hz();
    p.noise_w = dbm_to_watt(config.noise_psd_dbm_hz) * p.bandwidth_hz;
    p.p_max_w = dbm_to_watt(config.max_tx_power_dbm);
    p.interference_cap_w = dbm_to_watt(config.interference_threshold_dbm);
    p.urllc_weight = config.urllc_weight;
    p.validate();
    return p;
}

}  // namespace slicing
