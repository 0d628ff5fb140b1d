#include "slicing/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "slicing/error.hpp"
#include "slicing/units.hpp"

namespace slicing {

double path_loss_db(LinkType link, double distance_m) {
    const double d = std::max(distance_m, kMinDistanceM);
    switch (link) {
        case LinkType::MacroOutdoor: return 128.1 + 37.6 * std::log10(d / 1000.0);
        case LinkType::SmallCellIndoor: return 38.46 + 20.0 * std::log10(d);
        case LinkType::CrossWall: return 128.1 + 37.6 * std::log10(d / 1000.0) + kWallLossDb;
    }
    return 0.0;
}

double fading_gain(Stream& rng) { return rng.exponential(); }

LinkType link_type(const User& user, int station) {
    if (station == macro_station()) return user.indoor ? LinkType::CrossWall : LinkType::MacroOutdoor;
    if (!user.on_macro() && small_cell_station(user.cell) == station) return LinkType::SmallCellIndoor;
    return LinkType::CrossWall;
}

GainTensor::GainTensor(int num_users, int num_stations, int num_subchannels)
    : num_users_(num_users),
      num_stations_(num_stations),
      num_subchannels_(num_subchannels),
      gains_(static_cast<std::size_t>(num_users) * num_stations * num_subchannels, 0.0) {}

std::uint64_t channel_seed(const ScenarioConfig& config) {
    return derive_seed(config.seed, {tag(StreamTag::ChannelSeed)});
}

GainTensor build_gain_tensor(const Topology& topo, const ScenarioConfig& config, std::uint64_t seed,
                             Fading fading) {
    config.validate();
    const int expected_users =
        config.num_macro_users + config.num_small_cells * config.users_per_small_cell;
    if (static_cast<int>(topo.small_cells.size()) != config.num_small_cells ||
        static_cast<int>(topo.users.size()) != expected_users) {
        throw Error(ErrorKind::DimensionMismatch,
                    "topology has " + std::to_string(topo.small_cells.size()) + " cells and " +
                        std::to_string(topo.users.size()) + " users; config expects " +
                        std::to_string(config.num_small_cells) + " and " + std::to_string(expected_users));
    }
    for (std::size_t i = 0; i < topo.users.size(); ++i) {
        if (topo.users[i].id != static_cast<int>(i))
            throw Error(ErrorKind::DimensionMismatch, "user ids must be dense and ordered");
    }
    for (std::size_t k = 0; k < topo.small_cells.size(); ++k) {
        if (topo.small_cells[k].id != static_cast<int>(k))
            throw Error(ErrorKind::DimensionMismatch, "small-cell ids must be dense and ordered");
    }

    const int stations = config.num_small_cells + 1;
    const int n_sub = config.num_subchannels;
    GainTensor tensor(static_cast<int>(topo.users.size()), stations, n_sub);

    for (const User& u : topo.users) {
        for (int s = 0; s < stations; ++s) {
            const Point rx = s == macro_station() ? topo.macro_position : topo.small_cells[s - 1].center;
            const double path_gain = db_to_linear(-path_loss_db(link_type(u, s), distance(u.position, rx)));
            std::span<double> row = tensor.row(u.id, s);
            if (fading == Fading::None) {
                std::fill(row.begin(), row.end(), path_gain);
                continue;
            }
            // One substream per (user, station): order-independent and
            // unaffected by the presence of other entities.
            Stream rng(derive_seed(seed, {tag(StreamTag::Fading), static_cast<std::uint64_t>(u.id),
                                          static_cast<std::uint64_t>(s)}));
            for (double& g : row) g = path_gain * fading_gain(rng);
        }
    }
    return tensor;
}

void write_gain_csv(const GainTensor& gains, std::ostream& out) {
    out << "transmitter,receiver,subchannel,gain\n";
    char buf[64];
    for (int u = 0; u < gains.num_users(); ++u) {
        for (int s = 0; s < gains.num_stations(); ++s) {
            for (int n = 0; n < gains.num_subchannels(); ++n) {
                std::snprintf(buf, sizeof buf, "%.9e", gains.at(u, s, n));
                out << u << ',' << s << ',' << n << ',' << buf << '\n';
            }
        }
    }
}

}  // namespace slicing
