#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace slicing {

enum class Slice : std::uint8_t { eMBB, uRLLC, IoT };

std::string_view slice_name(Slice s);
Slice parse_slice(std::string_view name);

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

// Two-tier uplink scenario. Lengths in meters, powers in dBm, rates in bps.
struct ScenarioConfig {
    double macro_radius_m = 500.0;
    double small_cell_radius_m = 10.0;
    double min_small_cell_separation_m = 20.0;
    int num_small_cells = 10;
    int users_per_small_cell = 2;
    int num_macro_users = 50;
    double carrier_frequency_hz = 2e9;
    double total_bandwidth_hz = 10e6;
    int num_subchannels = 50;
    double max_tx_power_dbm = 23.0;
    double interference_threshold_dbm = -101.2;
    double noise_psd_dbm_hz = -174.0;
    double urllc_min_rate_bps = 3.6e6;
    double urllc_fraction = 0.5;
    // Objective weight of uRLLC throughput above its guarantee. eMBB is 1.
    double urllc_weight = 0.0;
    std::uint64_t seed = 1;

    // Throws Error(InvalidConfig) naming the first violated invariant.
    void validate() const;

    double subchannel_bandwidth_hz() const { return total_bandwidth_hz / num_subchannels; }

    bool operator==(const ScenarioConfig&) const = default;
};

inline constexpr int kMacroAttachment = -1;

struct SmallCell {
    int id = 0;
    Point center;
    bool operator==(const SmallCell&) const = default;
};

struct User {
    int id = 0;
    Point position;
    int cell = kMacroAttachment;  // small-cell id, or kMacroAttachment
    Slice slice = Slice::IoT;
    bool indoor = false;

    bool on_macro() const { return cell == kMacroAttachment; }
    bool operator==(const User&) const = default;
};

// Macro users carry ids [0, num_macro_users); the users of small cell k carry
// ids num_macro_users + k * users_per_small_cell + j. Ids therefore stay
// stable when the number of small cells changes.
struct Topology {
    Point macro_position;
    std::vector<SmallCell> small_cells;
    std::vector<User> users;

    bool operator==(const Topology&) const = default;
};

Topology generate_topology(const ScenarioConfig& config);

Topology assign_slices(Topology topology, double urllc_fraction);

struct Violation {
    std::string invariant;
    std::vector<int> entities;
    std::string detail;
};

std::vector<Violation> validate_topology(const Topology& topology, const ScenarioConfig& config);

}  // namespace slicing
