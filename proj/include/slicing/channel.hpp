#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "slicing/random.hpp"
#include "slicing/scenario.hpp"

namespace slicing {

// Substitutable propagation defaults: 3GPP-style suburban macro model, a
// free-space-like indoor model and one wall crossing.
enum class LinkType { MacroOutdoor, SmallCellIndoor, CrossWall };

inline constexpr double kWallLossDb = 10.0;
inline constexpr double kMinDistanceM = 1.0;

// Attenuation in dB; distances below kMinDistanceM are clamped.
double path_loss_db(LinkType link, double distance_m);

// Rayleigh block fading: unit-mean exponential power gain.
double fading_gain(Stream& rng);

enum class Fading { Rayleigh, None };

// Station 0 is the macrocell; station k + 1 is small cell k.
inline int macro_station() { return 0; }
inline int small_cell_station(int cell) { return cell + 1; }

LinkType link_type(const User& user, int station);

// Dense linear power gains indexed (transmitting user id, receiving station,
// subchannel). The subchannel dimension is contiguous.
class GainTensor {
public:
    GainTensor() = default;
    GainTensor(int num_users, int num_stations, int num_subchannels);

    int num_users() const { return num_users_; }
    int num_stations() const { return num_stations_; }
    int num_subchannels() const { return num_subchannels_; }

    double at(int user, int station, int subchannel) const {
        return gains_[offset(user, station) + subchannel];
    }
    std::span<const double> row(int user, int station) const {
        return {gains_.data() + offset(user, station), static_cast<std::size_t>(num_subchannels_)};
    }
    std::span<double> row(int user, int station) {
        return {gains_.data() + offset(user, station), static_cast<std::size_t>(num_subchannels_)};
    }

    bool operator==(const GainTensor&) const = default;

private:
    std::size_t offset(int user, int station) const {
        return (static_cast<std::size_t>(user) * num_stations_ + station) * num_subchannels_;
    }

    int num_users_ = 0;
    int num_stations_ = 0;
    int num_subchannels_ = 0;
    std::vector<double> gains_;
};

// Seed of the fading substreams; independent of the topology substreams.
std::uint64_t channel_seed(const ScenarioConfig& config);

GainTensor build_gain_tensor(const Topology& topology, const ScenarioConfig& config,
                             std::uint64_t seed, Fading fading = Fading::Rayleigh);

inline GainTensor build_gain_tensor(const Topology& topology, const ScenarioConfig& config) {
    return build_gain_tensor(topology, config, channel_seed(config));
}

// transmitter,receiver,subchannel,gain
void write_gain_csv(const GainTensor& gains, std::ostream& out);

}  // namespace slicing
