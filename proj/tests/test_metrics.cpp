#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "slicing/error.hpp"
#include "slicing/metrics.hpp"
#include "slicing/units.hpp"
#include "support.hpp"

using namespace slicing;

namespace {

ScenarioConfig small_config(int cells, int users, std::uint64_t seed, int subchannels = 10) {
    ScenarioConfig c;
    c.num_small_cells = cells;
    c.users_per_small_cell = users;
    c.seed = seed;
    c.num_subchannels = subchannels;
    c.total_bandwidth_hz = subchannels * 200e3;
    c.urllc_min_rate_bps = 2e5;
    return c;
}

// Macro uplink sum rate straight from the definition.
double naive_macro_capacity(const ScenarioConfig& c, const GainTensor& gains, const std::vector<double>& cross,
                            int ttis) {
    const double p_max = dbm_to_watt(c.max_tx_power_dbm);
    const double bw = c.total_bandwidth_hz / c.num_subchannels;
    const double noise = dbm_to_watt(c.noise_psd_dbm_hz) * bw;
    double total = 0.0;
    for (int t = 0; t < ttis; ++t) {
        std::map<int, int> held;
        for (int n = 0; n < c.num_subchannels; ++n) ++held[(t * c.num_subchannels + n) % c.num_macro_users];
        for (int n = 0; n < c.num_subchannels; ++n) {
            const int u = (t * c.num_subchannels + n) % c.num_macro_users;
            const double p = p_max / held[u];
            total += bw * std::log2(1.0 + p * gains.at(u, 0, n) / (noise + cross[n]));
        }
    }
    return total / ttis;
}

}  // namespace

TEST_CASE("round-robin macro schedule") {
    CHECK(schedule_macro(3, 4, 0) == std::vector<int>{0, 1, 2, 0});
    CHECK(schedule_macro(3, 4, 1) == std::vector<int>{1, 2, 0, 1});
    CHECK(schedule_macro(50, 50, 3) == schedule_macro(50, 50, 0));
    CHECK(schedule_macro(0, 2, 0) == std::vector<int>{-1, -1});
    CHECK(schedule_macro_ttis(0, 4, 10).empty());
    const auto s = schedule_macro_ttis(7, 5, 10);
    REQUIRE(s.size() == 10);
    std::vector<int> count(7, 0);
    for (const auto& tti : s)
        for (int u : tti) ++count[u];
    // 50 slots over 7 users: each gets 7 or 8.
    for (int c : count) CHECK((c == 7 || c == 8));
}

TEST_CASE("macro users keep their power budget") {
    for (const auto& schedule : schedule_macro_ttis(3, 10, 4)) {
        const std::vector<double> p = macro_user_powers(schedule, 3, 0.2);
        std::vector<double> used(3, 0.0);
        for (int u : schedule) used[u] += p[u];
        for (double x : used) CHECK(x == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("macro capacity") {
    const ScenarioConfig c = small_config(0, 2, 5);
    const Topology topo = generate_topology(c);
    const GainTensor gains = build_gain_tensor(topo, c);
    const auto schedules = schedule_macro_ttis(c.num_macro_users, c.num_subchannels, 10);
    const AllocationProblem p = build_problem(topo, gains, c, schedules);
    const double baseline = macro_uplink_capacity(schedules, gains, p, Allocation::empty(p), c);
    CHECK(baseline == doctest::Approx(naive_macro_capacity(c, gains, std::vector<double>(10, 0.0), 10)).epsilon(1e-12));
    CHECK(macro_uplink_capacity({}, gains, p, Allocation::empty(p), c) == 0.0);

    SUBCASE("small-cell transmissions reduce it") {
        const ScenarioConfig c4 = small_config(4, 2, 5);
        const Topology t4 = generate_topology(c4);
        const GainTensor g4 = build_gain_tensor(t4, c4);
        const AllocationProblem p4 = build_problem(t4, g4, c4, schedules);
        const SolveResult r = solve_dual(p4);
        std::vector<double> cross(10, 0.0);
        for (int s = 0; s < p4.num_slots(); ++s)
            for (int n = 0; n < 10; ++n)
                if (r.allocation.assigned(s, n))
                    cross[n] += r.allocation.power[r.allocation.at(s, n)] * p4.macro_gain[p4.at(s, n)];
        const double with = macro_uplink_capacity(schedules, g4, p4, r.allocation, c4);
        CHECK(with == doctest::Approx(naive_macro_capacity(c4, g4, cross, 10)).epsilon(1e-12));
        CHECK(with < macro_uplink_capacity(schedules, g4, p4, Allocation::empty(p4), c4));
        // Macro users and their fading are shared across K, so the empty
        // allocation reproduces the K = 0 baseline.
        CHECK(macro_uplink_capacity(schedules, g4, p4, Allocation::empty(p4), c4) ==
              doctest::Approx(baseline).epsilon(1e-12));
    }
}

TEST_CASE("co-tier interference") {
    const ScenarioConfig c = small_config(3, 2, 7);
    const Topology topo = generate_topology(c);
    const GainTensor gains = build_gain_tensor(topo, c);
    const AllocationProblem p = build_problem(topo, gains, c, schedule_macro_ttis(50, 10, 10));
    const SolveResult r = solve_dual(p);
    const std::vector<double> co = co_tier_interference(p, r.allocation, gains);
    REQUIRE(co.size() == 30);
    for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 10; ++n) {
            double expected = 0.0;
            for (const User& u : topo.users) {
                if (u.on_macro() || u.cell == k) continue;
                const int s = static_cast<int>(std::find_if(p.slots.begin(), p.slots.end(),
                                                            [&](const SlotInfo& i) { return i.user_id == u.id; }) -
                                               p.slots.begin());
                if (r.allocation.assigned(s, n))
                    expected += r.allocation.power[r.allocation.at(s, n)] * gains.at(u.id, k + 1, n);
            }
            CHECK(co[k * 10 + n] == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("fixed point") {
    SUBCASE("single cell stops after one round") {
        const FixedPointResult r = simulate(small_config(1, 4, 2));
        CHECK(r.round_embb_bps.size() == 1);
        CHECK(r.capacity.embb_bps == doctest::Approx(r.round_embb_bps[0]).epsilon(1e-12));
        CHECK(r.all_rounds_feasible);
    }
    SUBCASE("reported rates use the realised interference") {
        const ScenarioConfig c = small_config(6, 2, 3);
        const FixedPointResult r = simulate(c);
        CHECK(r.round_embb_bps.size() == 5);
        const Topology topo = generate_topology(c);
        const GainTensor gains = build_gain_tensor(topo, c);
        AllocationProblem realised = r.problem;
        realised.co_tier_interference = co_tier_interference(r.problem, r.solve.allocation, gains);
        const std::vector<double> rates = testing::naive_rates(realised, r.solve.allocation);
        double embb = 0.0, urllc = 0.0;
        for (int s = 0; s < realised.num_slots(); ++s)
            (realised.slots[s].slice == Slice::eMBB ? embb : urllc) += rates[s];
        CHECK(r.capacity.embb_bps == doctest::Approx(embb).epsilon(1e-9));
        CHECK(r.capacity.urllc_bps == doctest::Approx(urllc).epsilon(1e-9));
        CHECK(r.capacity.of(Slice::IoT) == r.capacity.iot_bps);
    }
    SUBCASE("25 cells settle") {
        ScenarioConfig c;
        c.num_small_cells = 25;
        c.users_per_small_cell = 2;
        c.seed = 4;
        const FixedPointResult r = simulate(c);
        REQUIRE(r.round_embb_bps.size() == 5);
        CHECK(std::abs(r.round_embb_bps[4] - r.round_embb_bps[3]) <= 0.01 * r.round_embb_bps[3]);
        CHECK(r.all_rounds_feasible);
        CHECK(r.weak_duality_held);
    }
    SUBCASE("invalid parameters") {
        NetworkParams p;
        p.damping = 0.0;
        CHECK_THROWS_AS(simulate(small_config(1, 2, 1), p), Error);
        p = {};
        p.rounds = 0;
        CHECK_THROWS_AS(simulate(small_config(1, 2, 1), p), Error);
    }
}

TEST_CASE("sweep") {
    const ScenarioConfig base = small_config(0, 2, 1);
    SweepSpec spec;
    spec.small_cell_counts = {0, 2, 4};
    spec.users_per_cell = {2, 4};
    spec.seeds = {1, 2, 3};

    SUBCASE("one row per point and slice, independent of the thread count") {
        const SweepResult one = run_sweep(base, spec, {}, 1);
        const SweepResult three = run_sweep(base, spec, {}, 3);
        CHECK(one.reports.size() == 18);
        CHECK(one.samples.size() == 18);
        CHECK(one.failures.empty());
        CHECK(one.reports == three.reports);
        for (const SliceReport& r : one.reports) CHECK(r.num_seeds == 3);
        for (std::size_t i = 1; i < one.reports.size(); ++i) {
            const SliceReport& a = one.reports[i - 1];
            const SliceReport& b = one.reports[i];
            CHECK(std::tie(a.num_small_cells, a.users_per_cell, a.slice) <
                  std::tie(b.num_small_cells, b.users_per_cell, b.slice));
        }
        // Aggregates recomputed from the samples.
        for (const SliceReport& r : one.reports) {
            std::vector<double> v;
            for (const SweepSample& s : one.samples)
                if (s.num_small_cells == r.num_small_cells && s.users_per_cell == r.users_per_cell)
                    v.push_back(s.capacity.of(r.slice));
            REQUIRE(v.size() == 3);
            const double mean = (v[0] + v[1] + v[2]) / 3.0;
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            CHECK(r.mean_capacity_bps == doctest::Approx(mean).epsilon(1e-12));
            CHECK(r.std_bps == doctest::Approx(std::sqrt(ss / 2.0)).epsilon(1e-9));
        }
        // Without small cells only the macro tier carries traffic.
        for (const SliceReport& r : one.reports)
            if (r.num_small_cells == 0 && r.slice != Slice::IoT) CHECK(r.mean_capacity_bps == 0.0);
    }
    SUBCASE("failed jobs are excluded and reported") {
        ScenarioConfig hard = base;
        hard.urllc_min_rate_bps = 1e12;
        SweepSpec s = spec;
        s.users_per_cell = {2};
        const SweepResult r = run_sweep(hard, s, {}, 2);
        CHECK(r.failures.size() == 6);
        for (const SweepFailure& f : r.failures) {
            CHECK(f.num_small_cells > 0);
            CHECK(f.error.rfind("InfeasibleMinRate", 0) == 0);
        }
        CHECK(r.reports.size() == 3);
        for (const SliceReport& rep : r.reports) CHECK(rep.num_small_cells == 0);
    }
    SUBCASE("single seed has zero spread") {
        SweepSpec s = spec;
        s.seeds = {9};
        s.small_cell_counts = {2};
        for (const SliceReport& r : run_sweep(base, s, {}, 1).reports) CHECK(r.std_bps == 0.0);
    }
    SUBCASE("invalid spec") {
        SweepSpec s = spec;
        s.seeds.clear();
        CHECK_THROWS_AS(run_sweep(base, s), Error);
    }
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3, 4}, {1, 100, 1000, 1e9}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(4.5 / std::sqrt(22.5)).epsilon(1e-12));
    CHECK_THROWS_AS(spearman({1, 2}, {1}), Error);
    testing::Gen g(42);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(8), y(8);
        for (int j = 0; j < 8; ++j) {
            x[j] = g.uniform(-1, 1);
            y[j] = g.uniform(-1, 1);
        }
        const double r = spearman(x, y);
        CHECK(r >= -1.0 - 1e-12);
        CHECK(r <= 1.0 + 1e-12);
        CHECK(spearman(y, x) == doctest::Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("thread count from the environment") { CHECK(sweep_threads() >= 1); }
