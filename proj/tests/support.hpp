#pragma once

// Generators and independent reference computations shared by the tests.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "slicing/allocator.hpp"
#include "slicing/metrics.hpp"
#include "slicing/problem.hpp"
#include "slicing/scenario.hpp"
#include "slicing/units.hpp"

namespace testing {

using namespace slicing;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin(double p = 0.5) { return unit() < p; }
    std::uint64_t bits() { return engine_(); }

private:
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 engine_;
};

inline constexpr double kPmax = 0.19952623149688797;    // 23 dBm
inline constexpr double kCap = 7.585775750291852e-14;   // -101.2 dBm
inline constexpr double kNoise = 7.962143411069972e-16; // -174 dBm/Hz over 200 kHz
inline constexpr double kBandwidth = 200e3;

// Synthetic problem with gains in the ranges the scenario produces.
inline AllocationProblem random_problem(Gen& g, int cells, int users, int subchannels, double r_min = 0.0) {
    std::vector<std::vector<Slice>> layout(cells);
    for (auto& cell : layout)
        for (int u = 0; u < users; ++u) cell.push_back(u % 2 == 0 && users > 1 ? Slice::uRLLC : Slice::eMBB);
    AllocationProblem p = AllocationProblem::with_layout(layout, subchannels, kNoise, kPmax, kCap, kBandwidth);
    for (int s = 0; s < p.num_slots(); ++s) {
        if (p.slots[s].slice == Slice::uRLLC) p.slots[s].min_rate_bps = r_min;
        const double own = g.log_uniform(1e-9, 1e-4);
        const double macro = g.log_uniform(1e-15, 1e-11);
        for (int n = 0; n < subchannels; ++n) {
            p.own_gain[p.at(s, n)] = own * g.log_uniform(0.05, 3.0);
            p.macro_gain[p.at(s, n)] = macro * g.log_uniform(0.05, 3.0);
        }
    }
    for (double& v : p.macro_interference) v = g.log_uniform(1e-17, 1e-12);
    for (double& v : p.co_tier_interference) v = g.coin(0.3) ? g.log_uniform(1e-17, 1e-13) : 0.0;
    return p;
}

// Scenario pipeline with a reduced number of 200 kHz subchannels.
inline AllocationProblem scenario_problem(std::uint64_t seed, int cells, int users, int subchannels,
                                          double r_min) {
    ScenarioConfig c;
    c.seed = seed;
    c.num_small_cells = cells;
    c.users_per_small_cell = users;
    c.num_subchannels = subchannels;
    c.total_bandwidth_hz = subchannels * 200e3;
    c.urllc_min_rate_bps = r_min;
    const Topology topo = generate_topology(c);
    const GainTensor gains = build_gain_tensor(topo, c);
    return build_problem(topo, gains, c, schedule_macro_ttis(c.num_macro_users, c.num_subchannels, 10));
}

// Rates straight from the definition, one subchannel at a time.
inline std::vector<double> naive_rates(const AllocationProblem& p, const Allocation& a) {
    std::vector<double> out(p.num_slots(), 0.0);
    for (int s = 0; s < p.num_slots(); ++s) {
        const int k = p.slots[s].cell;
        for (int n = 0; n < p.num_subchannels; ++n) {
            if (!a.assign[static_cast<std::size_t>(s) * p.num_subchannels + n]) continue;
            const double interference =
                p.macro_interference[static_cast<std::size_t>(k) * p.num_subchannels + n] +
                p.co_tier_interference[static_cast<std::size_t>(k) * p.num_subchannels + n];
            const double ratio = a.power[static_cast<std::size_t>(s) * p.num_subchannels + n] *
                                 p.own_gain[static_cast<std::size_t>(s) * p.num_subchannels + n] /
                                 (p.noise_w + interference);
            out[s] += p.bandwidth_hz * std::log2(1.0 + ratio);
        }
    }
    return out;
}

inline double naive_objective(const AllocationProblem& p, const std::vector<double>& rates) {
    double total = 0.0;
    for (int s = 0; s < p.num_slots(); ++s) {
        const double w = p.slots[s].slice == Slice::uRLLC ? p.urllc_weight : p.embb_weight;
        total += w * rates[s] / p.bandwidth_hz;
    }
    return total;
}

// Maximiser of w log2(1 + p g / npi) - c p over [0, p_max] by golden-section
// search; the function is concave in p.
inline double golden_section_power(double w, double c, double g, double npi, double p_max) {
    auto f = [&](double p) { return w * std::log2(1.0 + p * g / npi) - c * p; };
    double lo = 0.0, hi = p_max;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 300; ++i) {
        const double a = hi - r * (hi - lo);
        const double b = lo + r * (hi - lo);
        (f(a) < f(b) ? lo : hi) = (f(a) < f(b) ? a : b);
    }
    return 0.5 * (lo + hi);
}

// Exhaustive search over every joint choice of (user or idle, grid level) per
// (cell, subchannel), without any decomposition. Only for tiny instances.
inline double exhaustive_grid_optimum(const AllocationProblem& p, int levels) {
    const int cells = p.num_cells;
    const int n_sub = p.num_subchannels;
    const int entries = cells * n_sub;
    std::vector<int> users(cells);
    for (int k = 0; k < cells; ++k) users[k] = p.cell_offset[k + 1] - p.cell_offset[k];
    std::vector<int> choice(entries, 0);  // 0 idle, else 1 + local * (levels - 1) + level - 1
    double best = -std::numeric_limits<double>::infinity();
    const double step = p.p_max_w / (levels - 1);
    while (true) {
        Allocation a = Allocation::empty(p);
        for (int k = 0; k < cells; ++k)
            for (int n = 0; n < n_sub; ++n) {
                const int c = choice[k * n_sub + n];
                if (c == 0) continue;
                const int s = p.cell_offset[k] + (c - 1) / (levels - 1);
                const int level = (c - 1) % (levels - 1) + 1;
                a.assign[static_cast<std::size_t>(s) * n_sub + n] = 1;
                a.power[static_cast<std::size_t>(s) * n_sub + n] = level * step;
            }
        bool ok = true;
        for (int s = 0; s < p.num_slots() && ok; ++s) {
            double sum = 0.0;
            for (int n = 0; n < n_sub; ++n) sum += a.power[static_cast<std::size_t>(s) * n_sub + n];
            ok = sum <= p.p_max_w * (1.0 + 1e-12);
        }
        for (int n = 0; n < n_sub && ok; ++n) {
            double recv = 0.0;
            for (int s = 0; s < p.num_slots(); ++s)
                recv += a.power[static_cast<std::size_t>(s) * n_sub + n] *
                        p.macro_gain[static_cast<std::size_t>(s) * n_sub + n];
            ok = recv <= p.interference_cap_w;
        }
        if (ok) {
            const std::vector<double> rates = naive_rates(p, a);
            for (int s = 0; s < p.num_slots() && ok; ++s)
                if (p.slots[s].slice == Slice::uRLLC) ok = rates[s] >= p.slots[s].min_rate_bps;
            if (ok) best = std::max(best, naive_objective(p, rates));
        }
        int i = 0;
        for (; i < entries; ++i) {
            const int k = i / n_sub;
            if (++choice[i] <= users[k] * (levels - 1)) break;
            choice[i] = 0;
        }
        if (i == entries) break;
    }
    return best;
}

}  // namespace testing
