#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slicing/channel.hpp"
#include "slicing/scenario.hpp"

namespace slicing {

// One small-cell user as seen by the allocator. Slots of a cell are
// contiguous and ordered by ascending user id.
struct SlotInfo {
    int user_id = 0;
    int cell = 0;
    Slice slice = Slice::eMBB;
    double min_rate_bps = 0.0;
};

// Uplink allocation problem for all small cells in one interference round.
// Powers in W, gains linear, rates in bps. Per-(slot, subchannel) arrays are
// slot-major; per-(cell, subchannel) arrays are cell-major.
struct AllocationProblem {
    int num_cells = 0;
    int num_subchannels = 0;
    std::vector<int> cell_offset{0};  // slots of cell k: [cell_offset[k], cell_offset[k + 1])
    std::vector<SlotInfo> slots;

    std::vector<double> own_gain;    // slot -> serving small cell
    std::vector<double> macro_gain;  // slot -> macrocell

    std::vector<double> macro_interference;    // from scheduled macro users, per (cell, subchannel)
    std::vector<double> co_tier_interference;  // from other small cells, previous round

    double noise_w = 0.0;  // per subchannel
    double p_max_w = 0.0;
    double interference_cap_w = 0.0;  // per subchannel, at the macrocell
    double bandwidth_hz = 0.0;        // per subchannel

    double embb_weight = 1.0;
    double urllc_weight = 0.0;

    // Empty problem with the given per-cell slice layout, unit gains and no
    // interference. User ids are assigned sequentially.
    static AllocationProblem with_layout(const std::vector<std::vector<Slice>>& cells, int num_subchannels,
                                         double noise_w, double p_max_w, double interference_cap_w,
                                         double bandwidth_hz);

    int num_slots() const { return static_cast<int>(slots.size()); }
    int slots_begin(int cell) const { return cell_offset[cell]; }
    int slots_end(int cell) const { return cell_offset[cell + 1]; }

    std::size_t at(int slot, int n) const { return static_cast<std::size_t>(slot) * num_subchannels + n; }
    std::size_t cell_at(int cell, int n) const {
        return static_cast<std::size_t>(cell) * num_subchannels + n;
    }

    std::span<const double> own_row(int slot) const {
        return {own_gain.data() + at(slot, 0), static_cast<std::size_t>(num_subchannels)};
    }
    std::span<double> own_row(int slot) {
        return {own_gain.data() + at(slot, 0), static_cast<std::size_t>(num_subchannels)};
    }
    std::span<const double> macro_row(int slot) const {
        return {macro_gain.data() + at(slot, 0), static_cast<std::size_t>(num_subchannels)};
    }
    std::span<double> macro_row(int slot) {
        return {macro_gain.data() + at(slot, 0), static_cast<std::size_t>(num_subchannels)};
    }

    double interference(int cell, int n) const {
        return macro_interference[cell_at(cell, n)] + co_tier_interference[cell_at(cell, n)];
    }
    double noise_plus_interference(int cell, int n) const { return noise_w + interference(cell, n); }

    double base_weight(int slot) const {
        return slots[slot].slice == Slice::uRLLC ? urllc_weight : embb_weight;
    }
    bool has_min_rate(int slot) const {
        return slots[slot].slice == Slice::uRLLC && slots[slot].min_rate_bps > 0.0;
    }

    // Throws Error(DimensionMismatch) or Error(InvalidConfig).
    void validate() const;
};

struct Allocation {
    int num_slots = 0;
    int num_subchannels = 0;
    std::vector<std::uint8_t> assign;  // a[slot][n]
    std::vector<double> power;         // p[slot][n], W
    std::vector<double> rate_bps;      // per slot

    static Allocation empty(const AllocationProblem& problem);

    std::size_t at(int slot, int n) const { return static_cast<std::size_t>(slot) * num_subchannels + n; }
    bool assigned(int slot, int n) const { return assign[at(slot, n)] != 0; }

    bool operator==(const Allocation&) const = default;
};

struct DualState {
    std::vector<double> lambda;  // per slot, power budget
    std::vector<double> mu;      // per slot, min rate (zero unless uRLLC)
    std::vector<double> nu;      // per subchannel, interference cap
    int iteration = 0;
    double step_scale = 1.0;

    static DualState zero(const AllocationProblem& problem, double step_scale = 1.0);
    void validate(const AllocationProblem& problem) const;
};

// Average over the given TTIs of the interference the scheduled macro user of
// each subchannel causes at small cell k. schedules[t][n] is a macro user id.
std::vector<double> macro_interference_at_cells(const Topology& topology, const GainTensor& gains,
                                                const ScenarioConfig& config,
                                                const std::vector<std::vector<int>>& schedules);

// Builds the allocator input from a network snapshot. co_tier may be empty
// (zero) or hold one entry per (cell, subchannel).
AllocationProblem build_problem(const Topology& topology, const GainTensor& gains,
                                const ScenarioConfig& config, const std::vector<std::vector<int>>& schedules,
                                std::span<const double> co_tier = {});

// Transmit power of each macro user of one TTI: p_max split uniformly over
// the subchannels the user holds.
std::vector<double> macro_user_powers(const std::vector<int>& schedule, int num_macro_users, double p_max_w);

}  // namespace slicing
