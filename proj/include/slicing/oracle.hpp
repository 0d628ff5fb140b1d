#pragma once

#include <cstdint>

#include "slicing/problem.hpp"

namespace slicing {

struct OracleResult {
    Allocation allocation;
    double objective = 0.0;  // same units as objective_value
    std::uint64_t evaluations = 0;
};

// Exhaustive search over per-(cell, subchannel) user choices and powers on
// the grid {i * p_max / (levels - 1)}. Cells are enumerated independently
// (budget and minimum rates are per cell) and then combined under the shared
// interference cap by branch and bound. Throws Error(TooLarge) once more than
// max_evaluations configurations would be visited, Error(InfeasibleMinRate)
// if no grid point meets every minimum rate.
OracleResult brute_force_oracle(const AllocationProblem& problem, int power_levels,
                                std::uint64_t max_evaluations = 100'000'000);

}  // namespace slicing
