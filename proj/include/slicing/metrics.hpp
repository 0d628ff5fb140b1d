#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicing/allocator.hpp"
#include "slicing/channel.hpp"
#include "slicing/problem.hpp"
#include "slicing/scenario.hpp"

namespace slicing {

// Round-robin macro scheduler: subchannel n at TTI t serves
// (t * num_subchannels + n) mod num_macro_users.
std::vector<int> schedule_macro(int num_macro_users, int num_subchannels, int tti);

std::vector<std::vector<int>> schedule_macro_ttis(int num_macro_users, int num_subchannels, int ttis);

// Total IoT uplink rate at the macrocell in bps, averaged over the given TTIs.
// Small-cell transmissions of the allocation are cross-tier interference.
double macro_uplink_capacity(const std::vector<std::vector<int>>& schedules, const GainTensor& gains,
                             const AllocationProblem& problem, const Allocation& allocation,
                             const ScenarioConfig& config);

// Interference each small cell receives from the other cells' transmitters,
// per (cell, subchannel).
std::vector<double> co_tier_interference(const AllocationProblem& problem, const Allocation& allocation,
                                         const GainTensor& gains);

struct NetworkParams {
    int rounds = 5;
    double damping = 0.5;
    int ttis = 10;
    SolverParams solver;

    void validate() const;
    bool operator==(const NetworkParams&) const = default;
};

struct SliceCapacity {
    double embb_bps = 0.0;
    double urllc_bps = 0.0;
    double iot_bps = 0.0;

    double of(Slice s) const;
};

struct FixedPointResult {
    AllocationProblem problem;  // final round, co-tier interference as the solver saw it
    SolveResult solve;          // final round
    SliceCapacity capacity;     // small-cell rates at the realised co-tier interference
    std::vector<double> round_embb_bps;  // solver-side eMBB total per round
    bool all_rounds_feasible = true;
    bool weak_duality_held = true;
};

// Damped best-response loop over the co-tier interference: round 0 ignores
// it, each later round uses I = damping * I(previous allocation) +
// (1 - damping) * I(previous round).
FixedPointResult interference_fixed_point(const Topology& topology, const GainTensor& gains,
                                          const ScenarioConfig& config, const NetworkParams& params = {});

// Generates topology and gains for the config and runs the fixed point.
FixedPointResult simulate(const ScenarioConfig& config, const NetworkParams& params = {});

struct SliceReport {
    int num_small_cells = 0;
    int users_per_cell = 0;
    Slice slice = Slice::eMBB;
    double mean_capacity_bps = 0.0;
    double std_bps = 0.0;  // sample standard deviation, 0 for a single seed
    int num_seeds = 0;

    bool operator==(const SliceReport&) const = default;
};

struct SweepSpec {
    std::vector<int> small_cell_counts{10, 20, 30, 40, 50};
    std::vector<int> users_per_cell{2, 4};
    std::vector<std::uint64_t> seeds = default_seeds();

    static std::vector<std::uint64_t> default_seeds();
    void validate() const;
    bool operator==(const SweepSpec&) const = default;
};

struct SweepSample {
    int num_small_cells = 0;
    int users_per_cell = 0;
    std::uint64_t seed = 0;
    SliceCapacity capacity;
    bool all_rounds_feasible = true;
    bool weak_duality_held = true;
};

struct SweepFailure {
    int num_small_cells = 0;
    int users_per_cell = 0;
    std::uint64_t seed = 0;
    std::string error;
};

struct SweepResult {
    std::vector<SliceReport> reports;  // sorted by (cells, users, slice)
    std::vector<SweepSample> samples;  // job order: cells, users, seed
    std::vector<SweepFailure> failures;
};

// SLICE_ALLOC_THREADS, 0 or unset meaning the hardware concurrency.
int sweep_threads();

// Every (cells, users, seed) job runs independently; results are aggregated
// in job order, so the output does not depend on the thread count. A failed
// job is reported on standard error and left out of the aggregate.
SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec, const NetworkParams& params = {},
                      int threads = 0);

// Spearman rank correlation with average ranks for ties; NaN if either
// input is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace slicing
