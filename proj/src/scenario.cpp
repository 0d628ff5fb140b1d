#include "slicing/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slicing/error.hpp"
#include "slicing/random.hpp"

namespace slicing {

namespace {

constexpr int kPlacementAttempts = 10000;

Point uniform_in_disc(Stream& rng, Point center, double radius) {
    const double r = radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::InvalidConfig, what);
}

int urllc_count(double fraction, int users) {
    // Guard the product against representation error, e.g. 0.3 * 10.
    return static_cast<int>(std::ceil(fraction * users - 1e-9));
}

}  // namespace

std::string_view slice_name(Slice s) {
    switch (s) {
        case Slice::eMBB: return "eMBB";
        case Slice::uRLLC: return "uRLLC";
        case Slice::IoT: return "IoT";
    }
    return "?";
}

Slice parse_slice(std::string_view name) {
    if (name == "eMBB") return Slice::eMBB;
    if (name == "uRLLC") return Slice::uRLLC;
    if (name == "IoT") return Slice::IoT;
    throw Error(ErrorKind::InvalidConfig, "unknown slice '" + std::string(name) + "'");
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ScenarioConfig::validate() const {
    require(macro_radius_m > 0.0, "macro_radius must be > 0");
    require(small_cell_radius_m > 0.0, "small_cell_radius must be > 0");
    require(min_small_cell_separation_m > 0.0, "min_small_cell_separation must be > 0");
    require(min_small_cell_separation_m < 2.0 * macro_radius_m,
            "min_small_cell_separation must be < 2 * macro_radius");
    require(num_small_cells >= 0, "num_small_cells must be >= 0");
    require(users_per_small_cell >= 1, "users_per_small_cell must be >= 1");
    require(num_macro_users >= 0, "num_macro_users must be >= 0");
    require(num_subchannels >= 1, "num_subchannels must be >= 1");
    require(total_bandwidth_hz > 0.0, "total_bandwidth must be > 0");
    require(carrier_frequency_hz > 0.0, "carrier_frequency must be > 0");
    require(std::isfinite(max_tx_power_dbm), "max_tx_power must be finite");
    require(std::isfinite(interference_threshold_dbm), "interference_threshold must be finite");
    require(std::isfinite(noise_psd_dbm_hz), "noise_psd must be finite");
    require(urllc_min_rate_bps >= 0.0, "urllc_min_rate must be >= 0");
    require(urllc_fraction >= 0.0 && urllc_fraction <= 1.0, "urllc_fraction must lie in [0, 1]");
    require(urllc_weight >= 0.0, "urllc_weight must be >= 0");
}

Topology generate_topology(const ScenarioConfig& config) {
    config.validate();
    Topology topo;
    topo.macro_position = {0.0, 0.0};

    topo.small_cells.reserve(config.num_small_cells);
    for (int k = 0; k < config.num_small_cells; ++k) {
        Stream rng(derive_seed(config.seed, {tag(StreamTag::SmallCellPlacement),
                                             static_cast<std::uint64_t>(k)}));
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
            const Point c = uniform_in_disc(rng, topo.macro_position, config.macro_radius_m);
            bool ok = true;
            for (const SmallCell& other : topo.small_cells) {
                if (distance(c, other.center) < config.min_small_cell_separation_m) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                topo.small_cells.push_back({k, c});
                placed = true;
            }
        }
        if (!placed) {
            std::ostringstream msg;
            msg << "small cell " << k << " not placed after " << kPlacementAttempts << " attempts";
            throw Error(ErrorKind::PlacementInfeasible, msg.str());
        }
    }

    const int m = config.num_macro_users;
    const int per_cell = config.users_per_small_cell;
    topo.users.reserve(m + config.num_small_cells * per_cell);
    for (int i = 0; i < m; ++i) {
        Stream rng(derive_seed(config.seed, {tag(StreamTag::MacroUserPlacement),
                                             static_cast<std::uint64_t>(i)}));
        topo.users.push_back(
            {i, uniform_in_disc(rng, topo.macro_position, config.macro_radius_m), kMacroAttachment,
             Slice::IoT, false});
    }
    for (const SmallCell& cell : topo.small_cells) {
        for (int j = 0; j < per_cell; ++j) {
            Stream rng(derive_seed(config.seed, {tag(StreamTag::SmallCellUserPlacement),
                                                 static_cast<std::uint64_t>(cell.id),
                                                 static_cast<std::uint64_t>(j)}));
            topo.users.push_back({m + cell.id * per_cell + j,
                                  uniform_in_disc(rng, cell.center, config.small_cell_radius_m),
                                  cell.id, Slice::eMBB, true});
        }
    }
    return assign_slices(std::move(topo), config.urllc_fraction);
}

Topology assign_slices(Topology topology, double urllc_fraction) {
    // Users are grouped per cell; ids ascend within a cell by construction but
    // the rule is stated on ids, so rank explicitly.
    std::vector<std::vector<User*>> per_cell(topology.small_cells.size());
    for (User& u : topology.users) {
        if (u.on_macro()) {
            u.slice = Slice::IoT;
            continue;
        }
        if (u.cell >= 0 && static_cast<std::size_t>(u.cell) < per_cell.size())
            per_cell[u.cell].push_back(&u);
    }
    for (auto& members : per_cell) {
        std::sort(members.begin(), members.end(),
                  [](const User* a, const User* b) { return a->id < b->id; });
        const int n_urllc = urllc_count(urllc_fraction, static_cast<int>(members.size()));
        for (std::size_t i = 0; i < members.size(); ++i)
            members[i]->slice = static_cast<int>(i) < n_urllc ? Slice::uRLLC : Slice::eMBB;
    }
    return topology;
}

std::vector<Violation> validate_topology(const Topology& topo, const ScenarioConfig& config) {
    std::vector<Violation> out;
    const auto cell_count = static_cast<int>(topo.small_cells.size());
    if (cell_count != config.num_small_cells) {
        out.push_back({"small_cell_count", {}, "expected " + std::to_string(config.num_small_cells) +
                                                   ", found " + std::to_string(cell_count)});
    }
    for (const SmallCell& c : topo.small_cells) {
        if (distance(c.center, topo.macro_position) > config.macro_radius_m)
            out.push_back({"small_cell_within_macro", {c.id}, "center outside macro coverage"});
    }
    for (std::size_t a = 0; a < topo.small_cells.size(); ++a) {
        for (std::size_t b = a + 1; b < topo.small_cells.size(); ++b) {
            const SmallCell& ca = topo.small_cells[a];
            const SmallCell& cb = topo.small_cells[b];
            const double d = distance(ca.center, cb.center);
            if (d < config.min_small_cell_separation_m) {
                out.push_back({"small_cell_separation", {ca.id, cb.id},
                               "centers " + std::to_string(d) + " m apart"});
            }
        }
    }

    std::vector<int> members(topo.small_cells.size(), 0);
    int macro_users = 0;
    for (const User& u : topo.users) {
        if (u.on_macro()) {
            ++macro_users;
            if (u.slice != Slice::IoT)
                out.push_back({"macro_user_slice", {u.id}, "macro-attached user must be IoT"});
            if (u.indoor) out.push_back({"macro_user_outdoor", {u.id}, "macro user marked indoor"});
            if (distance(u.position, topo.macro_position) > config.macro_radius_m)
                out.push_back({"macro_user_within_macro", {u.id}, "user outside macro coverage"});
            continue;
        }
        const SmallCell* cell = nullptr;
        for (const SmallCell& c : topo.small_cells)
            if (c.id == u.cell) cell = &c;
        if (cell == nullptr) {
            out.push_back({"user_attachment", {u.id, u.cell}, "attached to unknown small cell"});
            continue;
        }
        ++members[&*cell - topo.small_cells.data()];
        if (u.slice == Slice::IoT)
            out.push_back({"small_cell_user_slice", {u.id, u.cell}, "small-cell user must be eMBB or uRLLC"});
        if (!u.indoor) out.push_back({"small_cell_user_indoor", {u.id}, "small-cell user marked outdoor"});
        if (distance(u.position, cell->center) > config.small_cell_radius_m)
            out.push_back({"user_within_small_cell", {u.id, u.cell}, "user outside small-cell radius"});
    }
    if (macro_users != config.num_macro_users) {
        out.push_back({"macro_user_count", {}, "expected " + std::to_string(config.num_macro_users) +
                                                   ", found " + std::to_string(macro_users)});
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (members[k] != config.users_per_small_cell) {
            out.push_back({"users_per_small_cell", {topo.small_cells[k].id},
                           "found " + std::to_string(members[k]) + " users"});
        }
    }
    return out;
}

}  // namespace slicing
