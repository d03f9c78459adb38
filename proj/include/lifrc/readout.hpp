#pragma once

// ADC-free state extraction: period counters on both VCOs, counter to
// frequency, and frequency to voltage with the threshold/averaging rule.

#include "lifrc/fabric.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace lifrc {

struct CounterPair {
    std::uint32_t c_f = 1; // positive VCO period in f_base ticks
    std::uint32_t c_g = 1; // negative VCO period in f_base ticks

    friend bool operator==(const CounterPair&, const CounterPair&) = default;
};

enum class EstimateSource : std::uint8_t { average, positive_only, negative_only };

struct VoltageEstimate {
    double v_hat = 0.0;
    EstimateSource source = EstimateSource::average;
};

/// Ideal last-full-period counts, rounded and clamped to [1, saturation].
CounterPair measure_counters(const NeuronState& neuron, const NeuronParams& params,
                             const ReadoutParams& readout = {});

/// f_base / c. Throws std::invalid_argument for c == 0.
double counter_to_freq(std::uint32_t count, double f_base);

/// Inverts both linear VCO models. The average is used inside the band
/// [pos.flat_threshold, neg.flat_threshold]; above it only the positive VCO is
/// trusted, below it only the negative one.
VoltageEstimate estimate_vcap(double f, double g, const NeuronParams& params);

struct SampleFrame {
    std::vector<double> v_hat;
    std::vector<CounterPair> counters;
};

SampleFrame sample_all(const FabricState& state, const ReservoirConfig& config);

/// Header "sample,v0..v{N-1},cf0,cg0,...,cf{N-1},cg{N-1}".
void write_frame_header(std::ostream& out, std::size_t neurons);
void write_frame_row(std::ostream& out, std::size_t sample_index, const SampleFrame& frame);

} // namespace lifrc
