#include <cmath>

#include "doctest.h"
#include "slicing/allocator.hpp"
#include "slicing/error.hpp"
#include "slicing/oracle.hpp"
#include "support.hpp"

using namespace slicing;
using testing::kBandwidth;
using testing::kCap;
using testing::kNoise;
using testing::kPmax;

TEST_CASE("single eMBB user takes p_max") {
    AllocationProblem p = AllocationProblem::with_layout({{Slice::eMBB}}, 1, kNoise, kPmax, kCap, kBandwidth);
    p.own_gain[0] = 1e-7;
    p.macro_gain[0] = 1e-15;
    const OracleResult r = brute_force_oracle(p, 8);
    CHECK(r.allocation.assigned(0, 0));
    CHECK(r.allocation.power[0] == doctest::Approx(kPmax).epsilon(1e-12));
    CHECK(r.objective == doctest::Approx(std::log2(1.0 + kPmax * 1e-7 / kNoise)).epsilon(1e-12));
}

TEST_CASE("zero-gain user is never scheduled") {
    AllocationProblem p =
        AllocationProblem::with_layout({{Slice::eMBB, Slice::eMBB}}, 3, kNoise, kPmax, kCap, kBandwidth);
    for (int n = 0; n < 3; ++n) {
        p.own_gain[p.at(0, n)] = 0.0;
        p.own_gain[p.at(1, n)] = 1e-8;
        p.macro_gain[p.at(0, n)] = 1e-15;
        p.macro_gain[p.at(1, n)] = 1e-15;
    }
    const OracleResult r = brute_force_oracle(p, 5);
    for (int n = 0; n < 3; ++n) CHECK(r.allocation.power[r.allocation.at(0, n)] == 0.0);
    CHECK(r.objective > 0.0);
}

TEST_CASE("decomposed search equals full enumeration") {
    testing::Gen g(41);
    for (int i = 0; i < 25; ++i) {
        const int cells = g.integer(1, 2), users = g.integer(1, 2), subchannels = g.integer(1, 3);
        const int levels = g.integer(2, 4);
        const double r_min = g.coin(0.5) ? g.log_uniform(1e4, 1e6) : 0.0;
        AllocationProblem p = testing::random_problem(g, cells, users, subchannels, r_min);
        // Tighten the cap so that it binds in some instances.
        p.interference_cap_w = g.log_uniform(1e-15, 1e-12);
        const double expected = testing::exhaustive_grid_optimum(p, levels);
        CAPTURE(i);
        if (!std::isfinite(expected)) {
            try {
                brute_force_oracle(p, levels);
                FAIL("expected InfeasibleMinRate");
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::InfeasibleMinRate);
            }
            continue;
        }
        const OracleResult r = brute_force_oracle(p, levels);
        CHECK(r.objective == doctest::Approx(expected).epsilon(1e-12));
        CHECK(check_feasibility(r.allocation, p).feasible);
        CHECK(objective_value(p, r.allocation) == doctest::Approx(r.objective).epsilon(1e-12));
    }
}

TEST_CASE("evaluation guard") {
    const AllocationProblem p = testing::scenario_problem(3, 3, 4, 8, 0.0);
    try {
        brute_force_oracle(p, 8, 1000);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooLarge);
    }
    AllocationProblem q = AllocationProblem::with_layout({{Slice::eMBB}}, 1, kNoise, kPmax, kCap, kBandwidth);
    CHECK_THROWS_AS(brute_force_oracle(q, 1), Error);
}

TEST_CASE("solver within five percent of the 16-level grid on small scenarios") {
    for (std::uint64_t seed = 11; seed <= 14; ++seed) {
        const AllocationProblem p = testing::scenario_problem(seed, 2, 2, 4, 3e5);
        const OracleResult o = brute_force_oracle(p, 16);
        const SolveResult r = solve_dual(p);
        CAPTURE(seed);
        CHECK(objective_value(p, r.allocation) >= 0.95 * o.objective);
        CHECK(r.diagnostics.best_dual >= o.objective * (1.0 - 1e-9));
    }
}
