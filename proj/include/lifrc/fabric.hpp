#pragma once

// Time-stepped simulation of N neurons plus the two input channels, wired
// through 4-bit weight modules.

#include "lifrc/neuron.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace lifrc {

inline constexpr int kMaxWeight = 15;

enum class ConnectionKind : std::uint8_t { none, excitation, inhibition };

struct ConnectionEntry {
    ConnectionKind kind = ConnectionKind::none;
    std::uint8_t weight = 0;

    static ConnectionEntry excite(int weight);
    static ConnectionEntry inhibit(int weight);

    bool connected() const { return kind != ConnectionKind::none; }
    Polarity polarity() const {
        return kind == ConnectionKind::inhibition ? Polarity::inhibition : Polarity::excitation;
    }
    friend bool operator==(const ConnectionEntry&, const ConnectionEntry&) = default;
};

/// Destination-major N x (N+2) table. Column j < N is neuron j, column N is
/// the F_EXC input channel and column N+1 the F_INH channel.
class ConnectivityMatrix {
public:
    ConnectivityMatrix() = default;
    explicit ConnectivityMatrix(std::size_t n) : n_(n), entries_(n * (n + 2)) {}

    std::size_t neurons() const { return n_; }
    std::size_t sources() const { return n_ + 2; }
    std::size_t exc_input() const { return n_; }
    std::size_t inh_input() const { return n_ + 1; }

    const ConnectionEntry& at(std::size_t dst, std::size_t src) const;
    void set(std::size_t dst, std::size_t src, ConnectionEntry entry);
    /// Unchecked; weight ranges are the validator's job.
    ConnectionEntry& raw(std::size_t dst, std::size_t src) { return entries_[dst * (n_ + 2) + src]; }

    std::size_t connection_count() const;

    friend bool operator==(const ConnectivityMatrix&, const ConnectivityMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<ConnectionEntry> entries_;
};

struct ReadoutParams {
    double f_base = 50e6;               // counter clock, Hz
    std::uint32_t saturation = 65535;   // 16-bit counter
};

struct ReservoirConfig {
    ConnectivityMatrix matrix;
    NeuronParams neuron_params;
    ReadoutParams readout;
    double delay_unit = 25e-9;     // seconds per weight-module delay element
    double input_max_freq = 1e6;   // F, Hz
    double microstep = 200e-9;     // seconds
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;      // volts, per-sample Gaussian on v_cap
    std::size_t fan_in_limit = 16; // I, per polarity; 0 disables the check
    bool allow_self_connections = false;

    std::size_t neurons() const { return matrix.neurons(); }
};

/// Pulse width emitted by a weight module: (weight + 1) delay elements.
double weight_to_width(int weight, double delay_unit);

/// Splits a normalised input into the excitation and inhibition channel
/// frequencies.
std::pair<double, double> input_frequencies(double u, double max_freq);

struct FabricState {
    std::vector<NeuronState> neurons;
    double input_phase_exc = 0.0;
    double input_phase_inh = 0.0;
    std::uint64_t microsteps = 0;
    double sim_time = 0.0;
    std::mt19937_64 rng;

    friend bool operator==(const FabricState&, const FabricState&) = default;
};

/// Immutable compiled form of a ReservoirConfig. Stepping functions take the
/// state by reference so long runs avoid copying the neuron vector.
class Fabric {
public:
    /// Throws std::invalid_argument if the config fails validation.
    explicit Fabric(ReservoirConfig config);

    const ReservoirConfig& config() const { return config_; }

    /// All neurons at v_rest, VCO phases drawn from the config seed.
    FabricState initial_state() const;

    void advance_microstep(FabricState& state, double u) const;

    /// Holds u for t_s seconds (an integer number of microsteps), then applies
    /// the optional per-sample noise.
    void run_until_sample(FabricState& state, double u, double t_s) const;

    /// Number of microsteps in a window of t_s seconds; throws if t_s is not a
    /// multiple of the microstep.
    std::size_t steps_per_sample(double t_s) const;

    /// Number of positive-VCO edges emitted by each source in the last
    /// microstep (N neurons then the two inputs).
    const std::vector<std::uint32_t>& last_edges() const { return edges_; }

private:
    struct Target {
        std::uint32_t dst;
        Polarity polarity;
        double width;
    };

    ReservoirConfig config_;
    double decay_ = 1.0;
    std::vector<std::vector<Target>> fanout_; // per source, ascending dst
    mutable std::vector<std::uint32_t> edges_;
};

} // namespace lifrc
