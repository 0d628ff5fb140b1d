#include "slicing/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "slicing/error.hpp"
#include "slicing/simd/kernels.hpp"

namespace slicing {

namespace {

using simd::kLn2;

constexpr double kRoundingSlack = 1e-12;  // relative

double step_size(const DualState& duals) {
    return duals.step_scale / std::sqrt(static_cast<double>(duals.iteration + 1));
}

void compute_cell_rates(const AllocationProblem& problem, Allocation& a, int k) {
    const simd::KernelTable& kernels = simd::active_kernels();
    const int n_sub = problem.num_subchannels;
    std::vector<double> npi(n_sub);
    std::vector<double> se(n_sub);
    for (int n = 0; n < n_sub; ++n) npi[n] = problem.noise_plus_interference(k, n);
    for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s) {
        kernels.spectral_efficiency(a.power.data() + a.at(s, 0), problem.own_gain.data() + problem.at(s, 0),
                                    npi.data(), se.data(), n_sub);
        double total = 0.0;
        for (int n = 0; n < n_sub; ++n)
            if (a.assigned(s, n)) total += se[n];
        a.rate_bps[s] = problem.bandwidth_hz * total;
    }
}

std::vector<double> slot_power_sums(const Allocation& a) {
    std::vector<double> sums(a.num_slots, 0.0);
    for (int s = 0; s < a.num_slots; ++s)
        for (int n = 0; n < a.num_subchannels; ++n) sums[s] += a.power[a.at(s, n)];
    return sums;
}

// Interference received by the macrocell on each subchannel, summed in slot order.
std::vector<double> received_at_macro(const AllocationProblem& p, const Allocation& a) {
    std::vector<double> recv(p.num_subchannels, 0.0);
    for (int s = 0; s < p.num_slots(); ++s)
        for (int n = 0; n < p.num_subchannels; ++n)
            if (a.assigned(s, n)) recv[n] += a.power[a.at(s, n)] * p.macro_gain[p.at(s, n)];
    return recv;
}

struct Choice {
    int n = 0;
    int owner = -1;
    double gain = 0.0;
    double npi = 0.0;
    double upper = 0.0;
    double potential = 0.0;
};

// Maximise sum log2(1 + p g / npi) over the chosen subchannels subject to
// sum p <= budget and 0 <= p <= upper.
std::vector<double> box_waterfill(const std::vector<Choice>& chosen, double budget) {
    std::vector<double> p(chosen.size(), 0.0);
    double total_upper = 0.0;
    for (const Choice& c : chosen) total_upper += c.upper;
    if (total_upper <= budget) {
        for (std::size_t i = 0; i < chosen.size(); ++i) p[i] = chosen[i].upper;
        return p;
    }
    // sum_i clamp(level - floor_i, 0, upper_i) is piecewise linear in the
    // level with breakpoints floor_i and floor_i + upper_i; walk them in order.
    std::vector<std::pair<double, int>> breaks;
    std::vector<double> floor(chosen.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const Choice& c = chosen[i];
        if (!(c.gain > 0.0) || !(c.upper > 0.0)) continue;
        floor[i] = c.npi / c.gain;
        breaks.emplace_back(floor[i], +1);
        breaks.emplace_back(floor[i] + c.upper, -1);
    }
    std::sort(breaks.begin(), breaks.end());
    double level = breaks.empty() ? 0.0 : breaks.front().first;
    double filled = 0.0;
    int slope = 0;
    for (const auto& [at, delta] : breaks) {
        const double next = filled + slope * (at - level);
        if (slope > 0 && next >= budget) break;
        filled = next;
        level = at;
        slope += delta;
    }
    if (slope > 0) level += (budget - filled) / slope;
    double sum = 0.0;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        p[i] = std::min(std::max(level - floor[i], 0.0), chosen[i].upper);
        sum += p[i];
    }
    if (sum > budget)
        for (double& x : p) x *= budget / sum;
    return p;
}

// Least total power with spectral efficiency sum log2(1 + p g / npi) >=
// target and 0 <= p <= cap: a water level L with p = clamp(L - npi / g, 0,
// cap). Between breakpoints the efficiency is a log2(L) + const, so the level
// is found exactly by walking them.
std::vector<double> least_power_fill(const std::vector<Choice>& chosen, const std::vector<double>& cap,
                                     double target) {
    std::vector<double> p(chosen.size(), 0.0);
    if (!(target > 0.0)) return p;
    struct Event {
        double at;
        int i;
        bool enter;
    };
    std::vector<Event> events;
    std::vector<double> floor(chosen.size(), 0.0);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (!(chosen[i].gain > 0.0) || !(cap[i] > 0.0)) continue;
        floor[i] = chosen[i].npi / chosen[i].gain;
        events.push_back({floor[i], static_cast<int>(i), true});
        events.push_back({floor[i] + cap[i], static_cast<int>(i), false});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });
    int active = 0;
    double sum_log_floor = 0.0;  // over active entries
    double capped = 0.0;         // efficiency of entries at their cap
    double level = events.empty() ? 0.0 : events.back().at;
    for (const Event& e : events) {
        if (active > 0) {
            const double at_event = active * std::log2(e.at) - sum_log_floor + capped;
            if (at_event >= target) {
                level = std::exp2((target - capped + sum_log_floor) / active);
                break;
            }
        }
        if (e.enter) {
            ++active;
            sum_log_floor += std::log2(floor[e.i]);
        } else {
            --active;
            sum_log_floor -= std::log2(floor[e.i]);
            capped += std::log2((floor[e.i] + cap[e.i]) / floor[e.i]);
        }
    }
    for (std::size_t i = 0; i < chosen.size(); ++i)
        if (chosen[i].gain > 0.0 && cap[i] > 0.0) p[i] = std::min(std::max(level - floor[i], 0.0), cap[i]);
    return p;
}

double choice_rate(const std::vector<Choice>& chosen, const std::vector<double>& p, double bandwidth) {
    double se = 0.0;
    for (std::size_t i = 0; i < chosen.size(); ++i)
        se += simd::spectral_efficiency_one(p[i], chosen[i].gain, chosen[i].npi);
    return bandwidth * se;
}

double relative_change(const std::vector<double>& before, const std::vector<double>& after) {
    double worst = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double scale = std::max({std::abs(before[i]), std::abs(after[i]), 1e-12});
        worst = std::max(worst, std::abs(after[i] - before[i]) / scale);
    }
    return worst;
}

// Rates as stored when they are present, recomputed otherwise.
std::vector<double> current_rates(const AllocationProblem& problem, const Allocation& a) {
    if (static_cast<int>(a.rate_bps.size()) == problem.num_slots()) return a.rate_bps;
    Allocation fresh = a;
    compute_rates(problem, fresh);
    return fresh.rate_bps;
}

}  // namespace

double sinr(double power_w, double signal_gain, double interference_w, double noise_w) {
    return power_w * signal_gain / (noise_w + interference_w);
}

double subchannel_capacity(double bandwidth_hz, double sinr) { return bandwidth_hz * std::log2(1.0 + sinr); }

double slot_weight(const AllocationProblem& problem, const DualState& duals, int slot) {
    return problem.base_weight(slot) + (problem.slots[slot].slice == Slice::uRLLC ? duals.mu[slot] : 0.0);
}

double kkt_power(const AllocationProblem& problem, const DualState& duals, int slot, int n) {
    const double w = slot_weight(problem, duals, slot);
    if (!(w > 0.0)) return 0.0;
    const std::size_t i = problem.at(slot, n);
    return simd::waterfill_one(w, duals.lambda[slot], problem.p_max_w, duals.nu[n], problem.macro_gain[i],
                               problem.own_gain[i], problem.noise_plus_interference(problem.slots[slot].cell, n));
}

SubproblemResult solve_subproblem(const AllocationProblem& problem, const DualState& duals, int cell, int n) {
    SubproblemResult best;
    const double npi = problem.noise_plus_interference(cell, n);
    for (int s = problem.slots_begin(cell); s < problem.slots_end(cell); ++s) {
        const double w = slot_weight(problem, duals, s);
        const double p = kkt_power(problem, duals, s, n);
        const std::size_t i = problem.at(s, n);
        const double value = w > 0.0 ? simd::lagrangian_one(w, duals.lambda[s], p, duals.nu[n],
                                                             problem.macro_gain[i], problem.own_gain[i], npi)
                                     : 0.0;
        if (value > best.value) best = {s, p, value};
    }
    return best;
}

void solve_subproblems(const AllocationProblem& problem, const DualState& duals, SubproblemBatch& batch) {
    const simd::KernelTable& kernels = simd::active_kernels();
    const int n_sub = problem.num_subchannels;
    const std::size_t per_slot = static_cast<std::size_t>(problem.num_slots()) * n_sub;
    const std::size_t per_cell = static_cast<std::size_t>(problem.num_cells) * n_sub;
    batch.power.resize(per_slot);
    batch.value.resize(per_slot);
    batch.winner.assign(per_cell, -1);
    batch.best.assign(per_cell, 0.0);

    std::vector<double> npi(n_sub);
    for (int k = 0; k < problem.num_cells; ++k) {
        for (int n = 0; n < n_sub; ++n) npi[n] = problem.noise_plus_interference(k, n);
        for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s) {
            double* power = batch.power.data() + problem.at(s, 0);
            double* value = batch.value.data() + problem.at(s, 0);
            const double w = slot_weight(problem, duals, s);
            if (!(w > 0.0)) {
                std::fill(power, power + n_sub, 0.0);
                std::fill(value, value + n_sub, 0.0);
                continue;
            }
            const simd::ChannelRow row{problem.own_gain.data() + problem.at(s, 0),
                                       problem.macro_gain.data() + problem.at(s, 0), npi.data(),
                                       duals.nu.data(), static_cast<std::size_t>(n_sub)};
            kernels.waterfill(w, duals.lambda[s], problem.p_max_w, row, power);
            kernels.lagrangian(w, duals.lambda[s], row, power, value);
        }
        for (int n = 0; n < n_sub; ++n) {
            const std::size_t c = problem.cell_at(k, n);
            for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s) {
                const double v = batch.value[problem.at(s, n)];
                if (v > batch.best[c]) {
                    batch.best[c] = v;
                    batch.winner[c] = s;
                }
            }
        }
    }
}

double dual_value(const AllocationProblem& problem, const DualState& duals, const SubproblemBatch& batch) {
    double total = 0.0;
    for (double b : batch.best) total += b;
    for (int s = 0; s < problem.num_slots(); ++s) {
        total += duals.lambda[s] * problem.p_max_w;
        if (problem.has_min_rate(s)) total -= duals.mu[s] * problem.slots[s].min_rate_bps / problem.bandwidth_hz;
    }
    for (double nu : duals.nu) total += nu * problem.interference_cap_w;
    return total;
}

double dual_value(const AllocationProblem& problem, const DualState& duals) {
    SubproblemBatch batch;
    solve_subproblems(problem, duals, batch);
    return dual_value(problem, duals, batch);
}

Allocation allocation_from_batch(const AllocationProblem& problem, const SubproblemBatch& batch) {
    Allocation a = Allocation::empty(problem);
    for (int k = 0; k < problem.num_cells; ++k) {
        for (int n = 0; n < problem.num_subchannels; ++n) {
            const int s = batch.winner[problem.cell_at(k, n)];
            if (s < 0) continue;
            a.assign[a.at(s, n)] = 1;
            a.power[a.at(s, n)] = batch.power[problem.at(s, n)];
        }
    }
    compute_rates(problem, a);
    return a;
}

void compute_rates(const AllocationProblem& problem, Allocation& a) {
    a.rate_bps.assign(problem.num_slots(), 0.0);
    for (int k = 0; k < problem.num_cells; ++k) compute_cell_rates(problem, a, k);
}

double objective_value(const AllocationProblem& problem, const Allocation& a) {
    double total = 0.0;
    for (int s = 0; s < problem.num_slots(); ++s) {
        const double w = problem.base_weight(s);
        if (w > 0.0) total += w * (a.rate_bps[s] / problem.bandwidth_hz);
    }
    return total;
}

DualState subgradient_update(const DualState& duals, const Allocation& allocation,
                             const AllocationProblem& problem) {
    DualState next = duals;
    const double step = step_size(duals);
    const std::vector<double> rate = current_rates(problem, allocation);
    const std::vector<double> sums = slot_power_sums(allocation);
    for (int s = 0; s < problem.num_slots(); ++s) {
        next.lambda[s] = std::max(0.0, duals.lambda[s] + step * (sums[s] - problem.p_max_w));
        if (problem.slots[s].slice == Slice::uRLLC) {
            const double deficit = (problem.slots[s].min_rate_bps - rate[s]) / problem.bandwidth_hz;
            next.mu[s] = std::max(0.0, duals.mu[s] + step * deficit);
        }
    }
    const std::vector<double> recv = received_at_macro(problem, allocation);
    for (int n = 0; n < problem.num_subchannels; ++n)
        next.nu[n] = std::max(0.0, duals.nu[n] + step * (recv[n] - problem.interference_cap_w));
    ++next.iteration;
    return next;
}

DualState geometric_price_update(const DualState& duals, const Allocation& allocation,
                                 const AllocationProblem& problem) {
    constexpr double kRatioFloor = 1e-6;
    constexpr double kRatioCeil = 1e6;
    constexpr double kPriceFloor = 1e-12;

    DualState next = duals;
    const double step = step_size(duals);
    const std::vector<double> rate = current_rates(problem, allocation);

    auto move = [&](double price, double load, double limit) {
        if (price > 0.0) {
            const double ratio = std::clamp(load / limit, kRatioFloor, kRatioCeil);
            const double moved = price * std::pow(ratio, step);
            return moved < kPriceFloor ? 0.0 : moved;
        }
        return load > limit ? step * (load / limit - 1.0) : 0.0;
    };

    const std::vector<double> sums = slot_power_sums(allocation);
    for (int s = 0; s < problem.num_slots(); ++s) {
        // Normalised prices: the problem is expected in solver units, but the
        // rule is scale-free in lambda and nu either way.
        next.lambda[s] = move(duals.lambda[s] * problem.p_max_w, sums[s], problem.p_max_w) / problem.p_max_w;
        if (problem.has_min_rate(s)) {
            const double r_min = problem.slots[s].min_rate_bps;
            const double deficit = std::clamp((r_min - rate[s]) / r_min, -1.0, 1.0);
            next.mu[s] = std::max(0.0, duals.mu[s] + step * deficit);
        } else {
            next.mu[s] = 0.0;
        }
    }
    const std::vector<double> recv = received_at_macro(problem, allocation);
    const double cap = problem.interference_cap_w;
    for (int n = 0; n < problem.num_subchannels; ++n) next.nu[n] = move(duals.nu[n] * cap, recv[n], cap) / cap;
    ++next.iteration;
    return next;
}

Allocation round_allocation(const AllocationProblem& problem, const CandidateState& cand) {
    Allocation a = Allocation::empty(problem);
    for (int k = 0; k < problem.num_cells; ++k) {
        for (int n = 0; n < problem.num_subchannels; ++n) {
            int winner = -1;
            double best = 0.0;
            for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s) {
                const double v = cand.score[problem.at(s, n)];
                if (v > best) {
                    best = v;
                    winner = s;
                }
            }
            if (winner < 0) continue;
            a.assign[a.at(winner, n)] = 1;
            a.power[a.at(winner, n)] = std::max(0.0, cand.power[problem.at(winner, n)]);
        }
    }

    const std::vector<double> sums = slot_power_sums(a);
    for (int s = 0; s < problem.num_slots(); ++s) {
        // Overshoot at the level of rounding noise is left alone so that
        // feasible input comes back bit for bit.
        if (sums[s] <= problem.p_max_w * (1.0 + kRoundingSlack)) continue;
        const double scale = problem.p_max_w / sums[s];
        for (int n = 0; n < problem.num_subchannels; ++n) a.power[a.at(s, n)] *= scale;
    }

    const std::vector<double> recv = received_at_macro(problem, a);
    for (int n = 0; n < problem.num_subchannels; ++n) {
        if (recv[n] <= problem.interference_cap_w * (1.0 + kRoundingSlack)) continue;
        const double scale = problem.interference_cap_w / recv[n];
        for (int s = 0; s < problem.num_slots(); ++s)
            if (a.assigned(s, n)) a.power[a.at(s, n)] *= scale;
    }
    compute_rates(problem, a);
    return a;
}

bool repair_min_rates(const AllocationProblem& problem, Allocation& a) {
    const int n_sub = problem.num_subchannels;
    const double cap = problem.interference_cap_w;
    compute_rates(problem, a);
    std::vector<double> recv = received_at_macro(problem, a);
    bool all_met = true;

    for (int k = 0; k < problem.num_cells; ++k) {
        for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s) {
            if (!problem.has_min_rate(s)) continue;
            const double r_min = problem.slots[s].min_rate_bps;
            const double target = r_min * (1.0 + 1e-9);
            if (a.rate_bps[s] >= target) continue;

            std::vector<Choice> owned;
            std::vector<Choice> others;
            for (int n = 0; n < n_sub; ++n) {
                int owner = -1;
                for (int o = problem.slots_begin(k); o < problem.slots_end(k); ++o)
                    if (a.assigned(o, n)) owner = owner < 0 || o == s ? o : owner;
                if (owner >= 0 && owner != s && problem.has_min_rate(owner)) continue;
                double others_recv = recv[n];
                if (owner >= 0) others_recv -= a.power[a.at(owner, n)] * problem.macro_gain[problem.at(owner, n)];
                const double headroom = std::max(0.0, cap - others_recv);
                const double gm = problem.macro_gain[problem.at(s, n)];
                Choice c;
                c.n = n;
                c.owner = owner;
                c.gain = problem.own_gain[problem.at(s, n)];
                c.npi = problem.noise_plus_interference(k, n);
                c.upper = gm > 0.0 ? std::min(problem.p_max_w, headroom / gm) : problem.p_max_w;
                c.potential = simd::spectral_efficiency_one(c.upper, c.gain, c.npi);
                (owner == s ? owned : others).push_back(c);
            }
            std::stable_sort(others.begin(), others.end(),
                             [](const Choice& x, const Choice& y) { return x.potential > y.potential; });

            // The best achievable rate only grows as subchannels are added, so
            // the shortest sufficient prefix of the ranking is bracketed by
            // doubling and then found by bisection. Short prefixes are the
            // common case and the cheap ones to evaluate.
            auto take = [&](std::size_t extra) {
                std::vector<Choice> c = owned;
                c.insert(c.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(extra));
                return c;
            };
            auto rate_with = [&](std::size_t extra) {
                const std::vector<Choice> c = take(extra);
                return choice_rate(c, box_waterfill(c, problem.p_max_w), problem.bandwidth_hz);
            };
            std::size_t lo = 0;
            std::size_t hi = 0;
            if (rate_with(0) < target) {
                hi = 1;
                while (hi < others.size() && rate_with(hi) < target) {
                    lo = hi;
                    hi *= 2;
                }
                if (hi >= others.size()) {
                    hi = others.size();
                    if (lo < hi && rate_with(hi) < target) lo = hi;
                }
                while (hi - lo > 1) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    (rate_with(mid) >= target ? hi : lo) = mid;
                }
            }
            const std::vector<Choice> chosen = take(hi);
            const std::vector<double> p = box_waterfill(chosen, problem.p_max_w);

            for (std::size_t i = 0; i < chosen.size(); ++i) {
                const Choice& c = chosen[i];
                if (c.owner >= 0) {
                    const std::size_t o = a.at(c.owner, c.n);
                    recv[c.n] -= a.power[o] * problem.macro_gain[problem.at(c.owner, c.n)];
                    a.assign[o] = 0;
                    a.power[o] = 0.0;
                }
                const std::size_t j = a.at(s, c.n);
                a.assign[j] = 1;
                a.power[j] = p[i];
                recv[c.n] += p[i] * problem.macro_gain[problem.at(s, c.n)];
            }
            compute_cell_rates(problem, a, k);
            if (a.rate_bps[s] < r_min) all_met = false;
        }
    }
    return all_met;
}

namespace {

// Per-cell local search state. contrib[cell_at(k, n)] is what the holder of
// (k, n) delivers to the macrocell; recv[n] sums it over cells.
class Polisher {
public:
    Polisher(const AllocationProblem& problem, Allocation& a) : p_(problem), a_(a) {
        const int n_sub = p_.num_subchannels;
        owner_.assign(static_cast<std::size_t>(p_.num_cells) * n_sub, -1);
        contrib_.assign(owner_.size(), 0.0);
        recv_.assign(n_sub, 0.0);
        for (int k = 0; k < p_.num_cells; ++k)
            for (int s = p_.slots_begin(k); s < p_.slots_end(k); ++s)
                for (int n = 0; n < n_sub; ++n)
                    if (a_.assigned(s, n)) {
                        owner_[p_.cell_at(k, n)] = s;
                        contrib_[p_.cell_at(k, n)] = a_.power[a_.at(s, n)] * p_.macro_gain[p_.at(s, n)];
                        recv_[n] += contrib_[p_.cell_at(k, n)];
                    }
        value_.assign(p_.num_slots(), 0.0);
        for (int s = 0; s < p_.num_slots(); ++s) value_[s] = p_.base_weight(s) * a_.rate_bps[s] / p_.bandwidth_hz;
    }

    int run(int max_passes) {
        int accepted = 0;
        for (int pass = 0; pass < max_passes; ++pass) {
            int before = accepted;
            for (int k = 0; k < p_.num_cells; ++k) {
                for (int s = p_.slots_begin(k); s < p_.slots_end(k); ++s) accepted += try_sets(k, s, held(k, s), -1, {});
                accepted += transfers(k) + swaps(k);
            }
            if (accepted == before) break;
        }
        return accepted;
    }

private:
    struct Plan {
        std::vector<int> subchannels;
        std::vector<double> power;
        double value = 0.0;
        bool ok = true;
    };

    std::vector<int> held(int k, int s) const {
        std::vector<int> out;
        for (int n = 0; n < p_.num_subchannels; ++n)
            if (owner_[p_.cell_at(k, n)] == s) out.push_back(n);
        return out;
    }

    Plan plan(int k, int s, const std::vector<int>& subchannels) const {
        Plan out;
        out.subchannels = subchannels;
        std::vector<Choice> c;
        for (int n : subchannels) {
            const double gm = p_.macro_gain[p_.at(s, n)];
            const double headroom = std::max(0.0, p_.interference_cap_w - (recv_[n] - contrib_[p_.cell_at(k, n)]));
            Choice ch;
            ch.n = n;
            ch.gain = p_.own_gain[p_.at(s, n)];
            ch.npi = p_.noise_plus_interference(k, n);
            ch.upper = gm > 0.0 ? std::min(p_.p_max_w, headroom / gm) : p_.p_max_w;
            c.push_back(ch);
        }
        const double w = p_.base_weight(s);
        const bool needs = p_.has_min_rate(s);
        out.power.assign(c.size(), 0.0);
        if (w > 0.0 || needs) out.power = box_waterfill(c, p_.p_max_w);
        double rate = choice_rate(c, out.power, p_.bandwidth_hz);
        if (needs) {
            const double target = p_.slots[s].min_rate_bps * (1.0 + 1e-9);
            if (rate < target) {
                out.ok = false;
                return out;
            }
            if (w == 0.0) {
                std::vector<double> least = least_power_fill(c, out.power, target / p_.bandwidth_hz);
                for (int tries = 0; tries < 4; ++tries) {
                    const double r = choice_rate(c, least, p_.bandwidth_hz);
                    if (r >= target) {
                        out.power = std::move(least);
                        rate = r;
                        break;
                    }
                    for (std::size_t i = 0; i < least.size(); ++i)
                        least[i] = std::min(out.power[i], least[i] * (1.0 + 1e-9) + 1e-300);
                }
            }
        }
        out.value = w * rate / p_.bandwidth_hz;
        return out;
    }

    void clear(int k, int s) {
        for (int n = 0; n < p_.num_subchannels; ++n) {
            const std::size_t j = a_.at(s, n);
            if (!a_.assign[j]) continue;
            a_.assign[j] = 0;
            a_.power[j] = 0.0;
            recv_[n] -= contrib_[p_.cell_at(k, n)];
            contrib_[p_.cell_at(k, n)] = 0.0;
            owner_[p_.cell_at(k, n)] = -1;
        }
    }

    void write(int k, int s, const Plan& plan) {
        for (std::size_t i = 0; i < plan.subchannels.size(); ++i) {
            const int n = plan.subchannels[i];
            const std::size_t j = a_.at(s, n);
            a_.assign[j] = 1;
            a_.power[j] = plan.power[i];
            contrib_[p_.cell_at(k, n)] = plan.power[i] * p_.macro_gain[p_.at(s, n)];
            recv_[n] += contrib_[p_.cell_at(k, n)];
            owner_[p_.cell_at(k, n)] = s;
        }
        value_[s] = plan.value;
    }

    // Re-plans s on set_s and, if t >= 0, t on set_t; keeps the result if the
    // combined value grows. Subchannels leaving both sets go idle.
    int try_sets(int k, int s, const std::vector<int>& set_s, int t, const std::vector<int>& set_t) {
        const Plan ps = plan(k, s, set_s);
        if (!ps.ok) return 0;
        Plan pt;
        if (t >= 0) {
            pt = plan(k, t, set_t);
            if (!pt.ok) return 0;
        }
        const double old_value = value_[s] + (t >= 0 ? value_[t] : 0.0);
        const double new_value = ps.value + (t >= 0 ? pt.value : 0.0);
        const bool same_sets = t < 0 && set_s == held(k, s);
        if (!(new_value > old_value + 1e-12 * std::max(1.0, std::abs(old_value)))) {
            // An unchanged set may still save power for a zero-weight user.
            if (same_sets && ps.value >= value_[s] && p_.base_weight(s) == 0.0) {
                clear(k, s);
                write(k, s, ps);
            }
            return 0;
        }
        clear(k, s);
        if (t >= 0) clear(k, t);
        write(k, s, ps);
        if (t >= 0) write(k, t, pt);
        return same_sets ? 0 : 1;
    }

    int transfers(int k) {
        int accepted = 0;
        for (int n = 0; n < p_.num_subchannels; ++n) {
            for (int u = p_.slots_begin(k); u < p_.slots_end(k); ++u) {
                const int o = owner_[p_.cell_at(k, n)];
                if (o == u) continue;
                std::vector<int> to = held(k, u);
                to.insert(std::upper_bound(to.begin(), to.end(), n), n);
                if (o < 0) {
                    accepted += try_sets(k, u, to, -1, {});
                    continue;
                }
                std::vector<int> from = held(k, o);
                from.erase(std::find(from.begin(), from.end(), n));
                accepted += try_sets(k, u, to, o, from);
            }
        }
        return accepted;
    }

    int swaps(int k) {
        int accepted = 0;
        for (int s = p_.slots_begin(k); s < p_.slots_end(k); ++s)
            for (int t = s + 1; t < p_.slots_end(k); ++t) {
                // Between two unconstrained users single transfers already
                // reach what a swap would; swaps matter where a minimum rate
                // blocks the transfers.
                if (!p_.has_min_rate(s) && !p_.has_min_rate(t)) continue;
                const std::vector<int> hs = held(k, s);
                const std::vector<int> ht = held(k, t);
                for (int na : hs)
                    for (int nb : ht) {
                        if (owner_[p_.cell_at(k, na)] != s || owner_[p_.cell_at(k, nb)] != t) continue;
                        std::vector<int> ss = held(k, s), tt = held(k, t);
                        ss.erase(std::find(ss.begin(), ss.end(), na));
                        ss.insert(std::upper_bound(ss.begin(), ss.end(), nb), nb);
                        tt.erase(std::find(tt.begin(), tt.end(), nb));
                        tt.insert(std::upper_bound(tt.begin(), tt.end(), na), na);
                        accepted += try_sets(k, s, ss, t, tt);
                    }
            }
        return accepted;
    }

    const AllocationProblem& p_;
    Allocation& a_;
    std::vector<int> owner_;
    std::vector<double> contrib_;
    std::vector<double> recv_;
    std::vector<double> value_;
};

}  // namespace

int polish_allocation(const AllocationProblem& problem, Allocation& allocation, int max_passes) {
    compute_rates(problem, allocation);
    Polisher polisher(problem, allocation);
    const int accepted = polisher.run(max_passes);
    compute_rates(problem, allocation);
    return accepted;
}

FeasibilityReport check_feasibility(const Allocation& allocation, const AllocationProblem& problem) {
    FeasibilityReport r;
    Allocation fresh = allocation;
    compute_rates(problem, fresh);

    const std::vector<double> sums = slot_power_sums(allocation);
    r.power_slack_w.resize(problem.num_slots());
    r.rate_slack_bps.resize(problem.num_slots());
    for (int s = 0; s < problem.num_slots(); ++s) {
        r.power_slack_w[s] = problem.p_max_w - sums[s];
        if (r.power_slack_w[s] < -kRelativeTolerance * problem.p_max_w) r.feasible = false;
        if (problem.slots[s].slice == Slice::uRLLC) {
            r.rate_slack_bps[s] = fresh.rate_bps[s] - problem.slots[s].min_rate_bps;
            if (r.rate_slack_bps[s] < -kRateToleranceBps) r.feasible = false;
        } else {
            r.rate_slack_bps[s] = std::numeric_limits<double>::infinity();
        }
        const double reported = s < static_cast<int>(allocation.rate_bps.size()) ? allocation.rate_bps[s] : 0.0;
        r.max_rate_mismatch = std::max(r.max_rate_mismatch,
                                       std::abs(reported - fresh.rate_bps[s]) / std::max(fresh.rate_bps[s], 1.0));
        for (int n = 0; n < problem.num_subchannels; ++n) {
            if (allocation.power[allocation.at(s, n)] > 0.0 && !allocation.assigned(s, n)) {
                r.unassigned_power.push_back(static_cast<int>(allocation.at(s, n)));
                r.feasible = false;
            }
        }
    }

    const std::vector<double> recv = received_at_macro(problem, allocation);
    r.interference_slack_w.resize(problem.num_subchannels);
    for (int n = 0; n < problem.num_subchannels; ++n) {
        r.interference_slack_w[n] = problem.interference_cap_w - recv[n];
        if (r.interference_slack_w[n] < -kRelativeTolerance * problem.interference_cap_w) r.feasible = false;
    }

    for (int k = 0; k < problem.num_cells; ++k) {
        for (int n = 0; n < problem.num_subchannels; ++n) {
            int users = 0;
            for (int s = problem.slots_begin(k); s < problem.slots_end(k); ++s) users += allocation.assigned(s, n);
            if (users > 1) {
                r.exclusivity_violations.push_back(static_cast<int>(problem.cell_at(k, n)));
                r.feasible = false;
            }
        }
    }
    return r;
}

void precheck_min_rates(const AllocationProblem& problem) {
    for (int s = 0; s < problem.num_slots(); ++s) {
        if (!problem.has_min_rate(s)) continue;
        const int k = problem.slots[s].cell;
        double se = 0.0;
        for (int n = 0; n < problem.num_subchannels; ++n) {
            se += simd::spectral_efficiency_one(problem.p_max_w, problem.own_gain[problem.at(s, n)],
                                                problem.noise_w + problem.macro_interference[problem.cell_at(k, n)]);
        }
        const double best = problem.bandwidth_hz * se;
        if (best < problem.slots[s].min_rate_bps) {
            throw Error(ErrorKind::InfeasibleMinRate,
                        "user " + std::to_string(problem.slots[s].user_id) + " reaches at most " +
                            std::to_string(best) + " bps < " + std::to_string(problem.slots[s].min_rate_bps));
        }
    }
}

AllocationProblem normalized_problem(const AllocationProblem& problem) {
    AllocationProblem q = problem;
    const double p_max = problem.p_max_w;
    const double macro_scale = p_max / problem.interference_cap_w;
    for (double& g : q.own_gain) g *= p_max;
    for (double& g : q.macro_gain) g *= macro_scale;
    for (SlotInfo& s : q.slots) s.min_rate_bps /= problem.bandwidth_hz;
    q.p_max_w = 1.0;
    q.interference_cap_w = 1.0;
    q.bandwidth_hz = 1.0;
    return q;
}

SolveResult solve_dual(const AllocationProblem& problem, const SolverParams& params) {
    problem.validate();
    if (params.max_iters < 1 || !(params.step_scale > 0.0) || !(params.tolerance > 0.0))
        throw Error(ErrorKind::InvalidConfig, "solver parameters out of range");
    precheck_min_rates(problem);

    const AllocationProblem q = normalized_problem(problem);
    SolveResult result;
    SolveDiagnostics& diag = result.diagnostics;

    DualState duals = DualState::zero(q, params.step_scale);
    for (int k = 0; k < q.num_cells; ++k) {
        const int members = q.slots_end(k) - q.slots_begin(k);
        // Price at which each user would spread p_max evenly over its share.
        const double share = static_cast<double>(members) / q.num_subchannels;
        for (int s = q.slots_begin(k); s < q.slots_end(k); ++s) duals.lambda[s] = 1.0 / (kLn2 * share);
    }

    Allocation best = Allocation::empty(q);
    Allocation last = best;
    compute_rates(q, best);
    SubproblemBatch batch;
    for (int it = 0; it < params.max_iters; ++it) {
        solve_subproblems(q, duals, batch);
        const double dual = dual_value(q, duals, batch);
        diag.dual_values.push_back(dual);
        diag.best_dual = std::min(diag.best_dual, dual);

        const Allocation relaxed = allocation_from_batch(q, batch);
        Allocation primal = round_allocation(q, CandidateState{batch.value, batch.power});
        const bool met = repair_min_rates(q, primal);
        if (met) {
            const double value = objective_value(q, primal);
            diag.primal_values.push_back(value);
            if (!diag.found_feasible || value > diag.best_primal) {
                diag.best_primal = value;
                best = primal;
                diag.found_feasible = true;
            }
        } else {
            diag.primal_values.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        last = std::move(primal);
        if (diag.found_feasible && dual < diag.best_primal - 1e-9 * std::abs(dual)) diag.weak_duality_held = false;

        const DualState next = params.price_rule == PriceRule::Geometric
                                   ? geometric_price_update(duals, relaxed, q)
                                   : subgradient_update(duals, relaxed, q);
        const double change = std::max({relative_change(duals.lambda, next.lambda),
                                         relative_change(duals.mu, next.mu), relative_change(duals.nu, next.nu)});
        duals = next;
        diag.iterations = it + 1;
        if (it + 1 >= params.min_iters && change < params.tolerance) {
            diag.converged = true;
            break;
        }
    }

    if (diag.found_feasible && params.polish_passes > 0) {
        polish_allocation(q, best, params.polish_passes);
        diag.best_primal = std::max(diag.best_primal, objective_value(q, best));
        if (diag.best_dual < diag.best_primal - 1e-9 * std::abs(diag.best_dual)) diag.weak_duality_held = false;
    }
    const Allocation& chosen = diag.found_feasible ? best : last;
    Allocation out = chosen;
    out.rate_bps.clear();
    for (double& p : out.power) p *= problem.p_max_w;
    compute_rates(problem, out);
    result.allocation = std::move(out);

    for (double& l : duals.lambda) l /= problem.p_max_w;
    for (double& nu : duals.nu) nu /= problem.interference_cap_w;
    result.duals = std::move(duals);
    diag.residuals = check_feasibility(result.allocation, problem);
    return result;
}

}  // namespace slicing
