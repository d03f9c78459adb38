#pragma once

// Reservoir generation, validation and serialization: the software side of
// programming the chip's configuration chain.

#include "lifrc/fabric.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lifrc {

/// Parameters for drawing a random reservoir.
struct ReservoirSpec {
    std::size_t n_neurons = 100;
    double connection_density = 0.04;   // per (neuron src, dst) pair
    double excitation_fraction = 0.5;   // among neuron-to-neuron links
    std::optional<int> fixed_weight = 8; // unset: uniform over 0..15
    double input_density = 1.0;         // per (input channel, dst) pair
    /// Polarity of input-channel links: false keeps F_EXC excitatory and F_INH
    /// inhibitory, true draws them with input_excitation_fraction.
    bool random_input_polarity = false;
    double input_excitation_fraction = 0.5;
    std::size_t fan_in_limit = 16;      // 0 disables
    std::uint64_t seed = 1;

    void validate() const;
};

/// Default physical parameters used by random_reservoir(); see README for the
/// calibration that produced them.
ReservoirConfig default_physical_config();

/// Seeded random reservoir. Fan-in overflow is resolved by dropping the
/// lowest-weight links (lower source index first on ties).
ReservoirConfig random_reservoir(const ReservoirSpec& spec,
                                 const ReservoirConfig& physical = default_physical_config());

struct Violation {
    enum class Kind { fan_in, weight_range, self_connection, timing, neuron_params, shape };
    Kind kind;
    std::optional<std::size_t> dst;
    std::optional<std::size_t> src;
    std::string message;
};

/// Every constraint violation in `config`; empty means valid.
std::vector<Violation> validate(const ReservoirConfig& config);

// ---------------------------------------------------------------------------
// Binary bitstream (.rcfg)
//
//   "RCFG" | version u8 | n u16 BE | count u32 BE |
//   count x (src u16 BE, dst u16 BE, flags u8) | CRC32 BE over all prior bytes
//
// flags: bit 7 set for inhibition, bits 3..0 weight, bits 6..4 zero.
// Records are ordered by destination, then source.

inline constexpr std::uint8_t kBitstreamVersion = 1;

class BitstreamError : public std::runtime_error {
public:
    BitstreamError(std::size_t offset, const std::string& what)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

std::vector<std::uint8_t> serialize(const ConnectivityMatrix& matrix);

/// Parses a bitstream into a matrix; throws BitstreamError on any defect.
ConnectivityMatrix deserialize(const std::vector<std::uint8_t>& bytes);

/// Config with `physical` parameters and the matrix from the bitstream.
ReservoirConfig deserialize_config(const std::vector<std::uint8_t>& bytes,
                                   const ReservoirConfig& physical = default_physical_config());

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size);

// ---------------------------------------------------------------------------
// Structured text config (JSON): neuron/fabric/readout parameters plus a
// connection list of [src, dst, "exc"|"inh", weight].

std::string to_text(const ReservoirConfig& config);
ReservoirConfig from_text(const std::string& text);

/// Hex CRC32 of the canonical text form.
std::string config_hash(const ReservoirConfig& config);

/// File could not be opened, read or written.
class ConfigIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads .rcfg (binary) or anything else as text config.
ReservoirConfig load_config(const std::filesystem::path& path);
void write_bitstream(const std::filesystem::path& path, const ReservoirConfig& config);
void write_text_config(const std::filesystem::path& path, const ReservoirConfig& config);

} // namespace lifrc
