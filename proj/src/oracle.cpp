#include "slicing/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slicing/allocator.hpp"
#include "slicing/error.hpp"
#include "slicing/simd/kernels.hpp"

namespace slicing {

namespace {

// One feasible configuration of a cell. code[n] is 0 for idle, otherwise
// 1 + local_slot * (levels - 1) + (level - 1).
struct CellConfig {
    double value = 0.0;
    std::vector<std::uint16_t> code;
};

class CellEnumerator {
public:
    CellEnumerator(const AllocationProblem& p, int cell, int levels, std::uint64_t& evaluations,
                   std::uint64_t limit)
        : p_(p), cell_(cell), levels_(levels), first_(p.slots_begin(cell)),
          users_(p.slots_end(cell) - p.slots_begin(cell)), evaluations_(evaluations), limit_(limit) {
        const int n_sub = p.num_subchannels;
        se_.assign(static_cast<std::size_t>(users_) * n_sub * levels, 0.0);
        for (int u = 0; u < users_; ++u)
            for (int n = 0; n < n_sub; ++n)
                for (int i = 0; i < levels; ++i)
                    se_[index(u, n, i)] = simd::spectral_efficiency_one(
                        grid_power(i), p.own_gain[p.at(first_ + u, n)], p.noise_plus_interference(cell, n));
        used_.assign(users_, 0);
        se_sum_.assign(users_, 0.0);
        code_.assign(n_sub, 0);
    }

    std::vector<CellConfig> run() {
        dfs(0);
        std::stable_sort(out_.begin(), out_.end(),
                         [](const CellConfig& a, const CellConfig& b) { return a.value > b.value; });
        return std::move(out_);
    }

private:
    double grid_power(int level) const { return level * (p_.p_max_w / (levels_ - 1)); }
    std::size_t index(int u, int n, int i) const {
        return (static_cast<std::size_t>(u) * p_.num_subchannels + n) * levels_ + i;
    }

    void dfs(int n) {
        if (n == p_.num_subchannels) {
            if (++evaluations_ > limit_)
                throw Error(ErrorKind::TooLarge, "oracle enumeration exceeds " + std::to_string(limit_));
            double value = 0.0;
            for (int u = 0; u < users_; ++u) {
                const int s = first_ + u;
                const double rate = p_.bandwidth_hz * se_sum_[u];
                if (p_.has_min_rate(s) && rate < p_.slots[s].min_rate_bps) return;
                value += p_.base_weight(s) * se_sum_[u];
            }
            out_.push_back({value, code_});
            return;
        }
        code_[n] = 0;
        dfs(n + 1);
        for (int u = 0; u < users_; ++u) {
            const double gm = p_.macro_gain[p_.at(first_ + u, n)];
            for (int i = 1; used_[u] + i <= levels_ - 1; ++i) {
                // Loads only add up, so a level over the cap on its own can
                // never fit; higher levels are worse still.
                if (grid_power(i) * gm > p_.interference_cap_w) break;
                const double before = se_sum_[u];
                used_[u] += i;
                se_sum_[u] += se_[index(u, n, i)];
                code_[n] = static_cast<std::uint16_t>(1 + u * (levels_ - 1) + (i - 1));
                dfs(n + 1);
                used_[u] -= i;
                se_sum_[u] = before;
            }
        }
        code_[n] = 0;
    }

    const AllocationProblem& p_;
    int cell_;
    int levels_;
    int first_;
    int users_;
    std::uint64_t& evaluations_;
    std::uint64_t limit_;
    std::vector<double> se_;
    std::vector<int> used_;
    std::vector<double> se_sum_;
    std::vector<std::uint16_t> code_;
    std::vector<CellConfig> out_;
};

struct Decoded {
    int slot = -1;
    int level = 0;
};

class Combiner {
public:
    Combiner(const AllocationProblem& p, int levels, const std::vector<std::vector<CellConfig>>& configs,
             std::uint64_t& evaluations, std::uint64_t limit)
        : p_(p), levels_(levels), configs_(configs), evaluations_(evaluations), limit_(limit) {
        const int cells = p.num_cells;
        bound_.assign(cells + 1, 0.0);
        for (int k = cells - 1; k >= 0; --k) bound_[k] = bound_[k + 1] + configs[k].front().value;
        load_.assign(p.num_subchannels, 0.0);
        pick_.assign(cells, 0);
    }

    bool run() {
        search(0, 0.0);
        return found_;
    }

    const std::vector<std::size_t>& best() const { return best_pick_; }
    double best_value() const { return best_value_; }

private:
    Decoded decode(int cell, std::uint16_t code) const {
        if (code == 0) return {};
        const int local = (code - 1) / (levels_ - 1);
        return {p_.slots_begin(cell) + local, (code - 1) % (levels_ - 1) + 1};
    }

    double received(int cell, int n, std::uint16_t code) const {
        const Decoded d = decode(cell, code);
        if (d.slot < 0) return 0.0;
        return d.level * (p_.p_max_w / (levels_ - 1)) * p_.macro_gain[p_.at(d.slot, n)];
    }

    void search(int cell, double value) {
        if (cell == p_.num_cells) {
            if (!found_ || value > best_value_) {
                found_ = true;
                best_value_ = value;
                best_pick_ = pick_;
            }
            return;
        }
        for (std::size_t c = 0; c < configs_[cell].size(); ++c) {
            const CellConfig& cfg = configs_[cell][c];
            // Sorted by value, so no later configuration can beat the incumbent.
            if (found_ && value + cfg.value + bound_[cell + 1] <= best_value_) return;
            if (++evaluations_ > limit_)
                throw Error(ErrorKind::TooLarge, "oracle enumeration exceeds " + std::to_string(limit_));
            bool fits = true;
            for (int n = 0; n < p_.num_subchannels && fits; ++n)
                fits = load_[n] + received(cell, n, cfg.code[n]) <= p_.interference_cap_w;
            if (!fits) continue;
            for (int n = 0; n < p_.num_subchannels; ++n) load_[n] += received(cell, n, cfg.code[n]);
            pick_[cell] = c;
            search(cell + 1, value + cfg.value);
            for (int n = 0; n < p_.num_subchannels; ++n) load_[n] -= received(cell, n, cfg.code[n]);
        }
    }

    const AllocationProblem& p_;
    int levels_;
    const std::vector<std::vector<CellConfig>>& configs_;
    std::uint64_t& evaluations_;
    std::uint64_t limit_;
    std::vector<double> bound_;
    std::vector<double> load_;
    std::vector<std::size_t> pick_;
    std::vector<std::size_t> best_pick_;
    double best_value_ = 0.0;
    bool found_ = false;
};

}  // namespace

OracleResult brute_force_oracle(const AllocationProblem& problem, int power_levels, std::uint64_t max_evaluations) {
    problem.validate();
    if (power_levels < 2) throw Error(ErrorKind::InvalidConfig, "oracle needs at least 2 power levels");

    OracleResult result;
    result.allocation = Allocation::empty(problem);
    if (problem.num_cells == 0) return result;

    std::vector<std::vector<CellConfig>> configs;
    for (int k = 0; k < problem.num_cells; ++k) {
        configs.push_back(CellEnumerator(problem, k, power_levels, result.evaluations, max_evaluations).run());
        if (configs.back().empty())
            throw Error(ErrorKind::InfeasibleMinRate, "no grid allocation of cell " + std::to_string(k) +
                                                          " meets its minimum rates");
    }

    Combiner combiner(problem, power_levels, configs, result.evaluations, max_evaluations);
    if (!combiner.run())
        throw Error(ErrorKind::InfeasibleMinRate, "no grid allocation meets the interference cap");

    const double step = problem.p_max_w / (power_levels - 1);
    for (int k = 0; k < problem.num_cells; ++k) {
        const CellConfig& cfg = configs[k][combiner.best()[k]];
        for (int n = 0; n < problem.num_subchannels; ++n) {
            if (cfg.code[n] == 0) continue;
            const int local = (cfg.code[n] - 1) / (power_levels - 1);
            const int level = (cfg.code[n] - 1) % (power_levels - 1) + 1;
            const int s = problem.slots_begin(k) + local;
            result.allocation.assign[result.allocation.at(s, n)] = 1;
            result.allocation.power[result.allocation.at(s, n)] = level * step;
        }
    }
    compute_rates(problem, result.allocation);
    result.objective = combiner.best_value();
    return result;
}

}  // namespace slicing
