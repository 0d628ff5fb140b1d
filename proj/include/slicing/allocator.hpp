#pragma once

// Joint subchannel and power allocation for the small-cell uplink.
//
// Objective: maximise sum_s weight_s * rate_s over small-cell users s, with
// rate_s = B * sum_n a[s][n] log2(1 + p[s][n] g[s][n] / (noise + I[k][n])),
// subject to a per-user power budget, a per-uRLLC-user minimum rate, a
// per-subchannel cap on the interference received by the macrocell, and at
// most one user per (cell, subchannel).
//
// Lagrangian (rates measured in bit/s/Hz so every subchannel carries the
// same scale):
//   L = sum_{k,n} sum_u a (w_u log2(1 + sinr) - lambda_u p - nu_n p g_macro)
//       + sum_u lambda_u p_max - sum_u mu_u r_min,u / B + sum_n nu_n cap
// with w_u = weight_u + mu_u. Relaxing the indicators leaves one independent
// subproblem per (cell, subchannel); its optimal power follows from the KKT
// stationarity condition (water-filling), and the multipliers are updated by
// a projected subgradient step.

#include <limits>
#include <vector>

#include "slicing/problem.hpp"

namespace slicing {

double sinr(double power_w, double signal_gain, double interference_w, double noise_w);

double subchannel_capacity(double bandwidth_hz, double sinr);

// weight_u + mu_u
double slot_weight(const AllocationProblem& problem, const DualState& duals, int slot);

// p* = clamp(w / (ln2 (lambda + nu g_macro)) - (noise + I) / g, 0, p_max).
// Zero weight yields zero power; zero prices yield p_max.
double kkt_power(const AllocationProblem& problem, const DualState& duals, int slot, int n);

struct SubproblemResult {
    int slot = -1;  // winning slot, or -1 for an idle subchannel
    double power = 0.0;
    double value = 0.0;
};

// Scalar reference for one (cell, subchannel).
SubproblemResult solve_subproblem(const AllocationProblem& problem, const DualState& duals, int cell, int n);

// All K x N subproblems at once through the active SIMD kernels.
struct SubproblemBatch {
    std::vector<double> power;  // per (slot, n): KKT power
    std::vector<double> value;  // per (slot, n): Lagrangian contribution
    std::vector<int> winner;    // per (cell, n)
    std::vector<double> best;   // per (cell, n): max(0, best value)
};

void solve_subproblems(const AllocationProblem& problem, const DualState& duals, SubproblemBatch& batch);

double dual_value(const AllocationProblem& problem, const DualState& duals, const SubproblemBatch& batch);
double dual_value(const AllocationProblem& problem, const DualState& duals);

// Allocation holding exactly the subproblem winners and their KKT powers.
Allocation allocation_from_batch(const AllocationProblem& problem, const SubproblemBatch& batch);

// Fills allocation.rate_bps from the assignment and powers.
void compute_rates(const AllocationProblem& problem, Allocation& allocation);

// sum_s weight_s rate_s / B, in bit/s/Hz.
double objective_value(const AllocationProblem& problem, const Allocation& allocation);

// Projected subgradient step with s_t = step_scale / sqrt(t), t = iteration + 1:
//   lambda_u <- [lambda_u + s_t (sum_n p - p_max)]+
//   mu_u     <- [mu_u + s_t (r_min - rate_u) / B]+        (uRLLC only)
//   nu_n     <- [nu_n + s_t (sum a p g_macro - cap)]+
DualState subgradient_update(const DualState& duals, const Allocation& allocation,
                             const AllocationProblem& problem);

// Scale-free variant used by default inside solve_dual: lambda and nu move
// multiplicatively by (load / limit)^s_t, which is a Newton step in the
// high-SINR regime where the KKT power is inversely proportional to the
// price; mu takes an additive step on the deficit relative to r_min,
// clipped to [-1, 1]. Zero prices restart additively.
DualState geometric_price_update(const DualState& duals, const Allocation& allocation,
                                 const AllocationProblem& problem);

struct CandidateState {
    std::vector<double> score;  // per (slot, n); a subchannel goes idle when no score is > 0
    std::vector<double> power;  // per (slot, n)
};

// Per (cell, subchannel) the highest-scoring user (ties to the lowest id) gets
// the subchannel exclusively; then each user's powers are scaled down
// uniformly to fit p_max, and each subchannel's transmitters are scaled down
// proportionally to fit the interference cap. Overshoot below 1e-12
// relative is treated as rounding noise, so feasible input comes back
// unchanged.
Allocation round_allocation(const AllocationProblem& problem, const CandidateState& candidates);

// Moves subchannels of the same cell (idle or eMBB-held) to uRLLC users below
// their minimum rate and re-waterfills those users within the remaining
// budget and interference headroom. Keeps the power and interference
// constraints intact. Returns false if some minimum rate is still missed.
bool repair_min_rates(const AllocationProblem& problem, Allocation& allocation);

// Local search on a feasible allocation: moves single subchannels between
// users of one cell, or swaps a pair of them, and re-optimises the affected
// users' powers within their budgets and the interference headroom the other
// cells leave (rate-maximising water-filling for weighted users, least power
// for zero-weight users with a minimum rate). A move is kept only if the
// weighted sum rate grows and every minimum rate still holds, so
// objective_value never decreases. Returns the number of accepted moves.
int polish_allocation(const AllocationProblem& problem, Allocation& allocation, int max_passes = 8);

struct FeasibilityReport {
    std::vector<double> power_slack_w;         // per slot: p_max - sum_n p
    std::vector<double> rate_slack_bps;        // per slot: rate - r_min (+inf without a minimum)
    std::vector<double> interference_slack_w;  // per subchannel: cap - received
    std::vector<int> exclusivity_violations;   // cell * N + n with more than one user
    std::vector<int> unassigned_power;         // slot * N + n with p > 0 but a = 0
    double max_rate_mismatch = 0.0;            // relative, reported vs recomputed rates
    bool feasible = true;
};

inline constexpr double kRelativeTolerance = 1e-6;
inline constexpr double kRateToleranceBps = 1.0;

FeasibilityReport check_feasibility(const Allocation& allocation, const AllocationProblem& problem);

// Best case for each uRLLC user: all subchannels of its cell at p_max with no
// co-tier interference. Throws Error(InfeasibleMinRate) if r_min is still out
// of reach.
void precheck_min_rates(const AllocationProblem& problem);

enum class PriceRule { Geometric, Additive };

struct SolverParams {
    int max_iters = 500;
    double step_scale = 1.0;
    double tolerance = 1e-4;
    int min_iters = 20;
    PriceRule price_rule = PriceRule::Geometric;
    int polish_passes = 8;  // local search on the best primal, 0 to skip
    bool operator==(const SolverParams&) const = default;
};

struct SolveDiagnostics {
    std::vector<double> dual_values;    // bit/s/Hz, per iteration
    std::vector<double> primal_values;  // rounded and repaired primal per iteration, NaN if infeasible
    double best_dual = std::numeric_limits<double>::infinity();
    double best_primal = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;      // multiplier change fell below tolerance
    bool found_feasible = false;
    bool weak_duality_held = true;  // every dual value >= best feasible primal so far
    FeasibilityReport residuals;
};

struct SolveResult {
    Allocation allocation;
    DualState duals;  // in the problem's units
    SolveDiagnostics diagnostics;
};

// The solver works on a rescaled copy (p_max = 1, cap = 1, unit bandwidth) so
// that all multipliers are O(1); results are mapped back.
SolveResult solve_dual(const AllocationProblem& problem, const SolverParams& params = {});

// Rescaled copy; see solve_dual.
AllocationProblem normalized_problem(const AllocationProblem& problem);

}  // namespace slicing
