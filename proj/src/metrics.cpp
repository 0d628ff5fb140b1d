#include "slicing/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <numeric>
#include <thread>

#include "slicing/error.hpp"
#include "slicing/units.hpp"

namespace slicing {

std::vector<int> schedule_macro(int num_macro_users, int num_subchannels, int tti) {
    std::vector<int> out(num_subchannels);
    if (num_macro_users <= 0) return std::vector<int>(num_subchannels, -1);
    const long long base = static_cast<long long>(tti) * num_subchannels;
    for (int n = 0; n < num_subchannels; ++n) out[n] = static_cast<int>((base + n) % num_macro_users);
    return out;
}

std::vector<std::vector<int>> schedule_macro_ttis(int num_macro_users, int num_subchannels, int ttis) {
    std::vector<std::vector<int>> out;
    if (num_macro_users <= 0) return out;
    for (int t = 0; t < ttis; ++t) out.push_back(schedule_macro(num_macro_users, num_subchannels, t));
    return out;
}

double macro_uplink_capacity(const std::vector<std::vector<int>>& schedules, const GainTensor& gains,
                             const AllocationProblem& problem, const Allocation& allocation,
                             const ScenarioConfig& config) {
    if (schedules.empty()) return 0.0;
    const int n_sub = config.num_subchannels;
    const double p_max = dbm_to_watt(config.max_tx_power_dbm);
    const double bandwidth = config.subchannel_bandwidth_hz();
    const double noise = dbm_to_watt(config.noise_psd_dbm_hz) * bandwidth;

    std::vector<double> cross(n_sub, 0.0);
    for (int s = 0; s < problem.num_slots(); ++s)
        for (int n = 0; n < n_sub; ++n)
            if (allocation.assigned(s, n))
                cross[n] += allocation.power[allocation.at(s, n)] * problem.macro_gain[problem.at(s, n)];

    double total = 0.0;
    for (const auto& schedule : schedules) {
        const std::vector<double> power = macro_user_powers(schedule, config.num_macro_users, p_max);
        double tti = 0.0;
        for (int n = 0; n < n_sub; ++n) {
            const int u = schedule[n];
            tti += subchannel_capacity(bandwidth, sinr(power[u], gains.at(u, macro_station(), n), cross[n], noise));
        }
        total += tti;
    }
    return total / static_cast<double>(schedules.size());
}

std::vector<double> co_tier_interference(const AllocationProblem& problem, const Allocation& allocation,
                                         const GainTensor& gains) {
    const int n_sub = problem.num_subchannels;
    std::vector<double> out(static_cast<std::size_t>(problem.num_cells) * n_sub, 0.0);
    for (int k = 0; k < problem.num_cells; ++k) {
        for (int s = 0; s < problem.num_slots(); ++s) {
            if (problem.slots[s].cell == k) continue;
            const auto g = gains.row(problem.slots[s].user_id, small_cell_station(k));
            for (int n = 0; n < n_sub; ++n)
                if (allocation.assigned(s, n))
                    out[problem.cell_at(k, n)] += allocation.power[allocation.at(s, n)] * g[n];
        }
    }
    return out;
}

void NetworkParams::validate() const {
    if (rounds < 1) throw Error(ErrorKind::InvalidConfig, "rounds must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorKind::InvalidConfig, "damping must be in (0, 1]");
    if (ttis < 1) throw Error(ErrorKind::InvalidConfig, "ttis must be >= 1");
}

double SliceCapacity::of(Slice s) const {
    switch (s) {
        case Slice::eMBB: return embb_bps;
        case Slice::uRLLC: return urllc_bps;
        case Slice::IoT: return iot_bps;
    }
    return 0.0;
}

namespace {

double slice_total(const AllocationProblem& problem, const Allocation& allocation, Slice slice) {
    double total = 0.0;
    for (int s = 0; s < problem.num_slots(); ++s)
        if (problem.slots[s].slice == slice) total += allocation.rate_bps[s];
    return total;
}

}  // namespace

FixedPointResult interference_fixed_point(const Topology& topology, const GainTensor& gains,
                                          const ScenarioConfig& config, const NetworkParams& params) {
    params.validate();
    const auto schedules = schedule_macro_ttis(config.num_macro_users, config.num_subchannels, params.ttis);

    FixedPointResult out;
    std::vector<double> co;
    for (int round = 0; round < params.rounds; ++round) {
        AllocationProblem problem = build_problem(topology, gains, config, schedules, co);
        SolveResult solve = solve_dual(problem, params.solver);
        out.all_rounds_feasible = out.all_rounds_feasible && solve.diagnostics.residuals.feasible;
        out.weak_duality_held = out.weak_duality_held && solve.diagnostics.weak_duality_held;
        out.round_embb_bps.push_back(slice_total(problem, solve.allocation, Slice::eMBB));

        const std::vector<double> computed = co_tier_interference(problem, solve.allocation, gains);
        if (co.empty()) co.assign(computed.size(), 0.0);
        for (std::size_t i = 0; i < co.size(); ++i)
            co[i] = params.damping * computed[i] + (1.0 - params.damping) * co[i];

        out.problem = std::move(problem);
        out.solve = std::move(solve);
        if (topology.small_cells.size() <= 1) break;  // no neighbours, later rounds repeat round 0
    }

    // Report the rates the final allocation actually achieves given the
    // interference it causes itself.
    AllocationProblem realised = out.problem;
    realised.co_tier_interference = co_tier_interference(out.problem, out.solve.allocation, gains);
    Allocation achieved = out.solve.allocation;
    compute_rates(realised, achieved);
    out.capacity.embb_bps = slice_total(realised, achieved, Slice::eMBB);
    out.capacity.urllc_bps = slice_total(realised, achieved, Slice::uRLLC);
    out.capacity.iot_bps = macro_uplink_capacity(schedules, gains, out.problem, out.solve.allocation, config);
    return out;
}

FixedPointResult simulate(const ScenarioConfig& config, const NetworkParams& params) {
    config.validate();
    const Topology topology = generate_topology(config);
    const GainTensor gains = build_gain_tensor(topology, config);
    return interference_fixed_point(topology, gains, config, params);
}

std::vector<std::uint64_t> SweepSpec::default_seeds() {
    std::vector<std::uint64_t> seeds(20);
    std::iota(seeds.begin(), seeds.end(), 1);
    return seeds;
}

void SweepSpec::validate() const {
    if (small_cell_counts.empty() || users_per_cell.empty() || seeds.empty())
        throw Error(ErrorKind::InvalidConfig, "sweep lists must be non-empty");
    for (int k : small_cell_counts)
        if (k < 0) throw Error(ErrorKind::InvalidConfig, "small cell counts must be >= 0");
    for (int u : users_per_cell)
        if (u < 1) throw Error(ErrorKind::InvalidConfig, "users per cell must be >= 1");
}

int sweep_threads() {
    const char* env = std::getenv("SLICE_ALLOC_THREADS");
    int n = 0;
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 0) n = static_cast<int>(std::min(v, 1024L));
    }
    if (n == 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}

SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec, const NetworkParams& params,
                      int threads) {
    spec.validate();
    params.validate();

    struct Job {
        int cells;
        int users;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int k : spec.small_cell_counts)
        for (int u : spec.users_per_cell)
            for (std::uint64_t seed : spec.seeds) jobs.push_back({k, u, seed});

    struct Outcome {
        bool ok = false;
        SweepSample sample;
        std::string error;
    };
    std::vector<Outcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            ScenarioConfig config = base;
            config.num_small_cells = jobs[i].cells;
            config.users_per_small_cell = jobs[i].users;
            config.seed = jobs[i].seed;
            Outcome& o = outcomes[i];
            o.sample = {jobs[i].cells, jobs[i].users, jobs[i].seed, {}, true, true};
            try {
                const FixedPointResult r = simulate(config, params);
                o.sample.capacity = r.capacity;
                o.sample.all_rounds_feasible = r.all_rounds_feasible;
                o.sample.weak_duality_held = r.weak_duality_held;
                o.ok = true;
            } catch (const Error& e) {
                o.error = e.what();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(threads > 0 ? threads : sweep_threads(),
                                                    static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    SweepResult result;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (outcomes[i].ok) {
            result.samples.push_back(outcomes[i].sample);
        } else {
            result.failures.push_back({jobs[i].cells, jobs[i].users, jobs[i].seed, outcomes[i].error});
            std::cerr << "warning: cells=" << jobs[i].cells << " users=" << jobs[i].users
                      << " seed=" << jobs[i].seed << " excluded: " << outcomes[i].error << '\n';
        }
    }

    std::vector<int> cells = spec.small_cell_counts;
    std::vector<int> users = spec.users_per_cell;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    for (int k : cells) {
        for (int u : users) {
            for (Slice slice : {Slice::eMBB, Slice::uRLLC, Slice::IoT}) {
                std::vector<double> values;
                for (const SweepSample& s : result.samples)
                    if (s.num_small_cells == k && s.users_per_cell == u) values.push_back(s.capacity.of(slice));
                if (values.empty()) continue;
                const double n = static_cast<double>(values.size());
                double mean = 0.0;
                for (double v : values) mean += v;
                mean /= n;
                double ss = 0.0;
                for (double v : values) ss += (v - mean) * (v - mean);
                const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
                result.reports.push_back({k, u, slice, mean, sd, static_cast<int>(values.size())});
            }
        }
    }
    return result;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) rank[order[m]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "spearman inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double mean = 0.5 * static_cast<double>(n + 1);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace slicing
