#include "lifrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lifrc {

namespace {

std::uint32_t period_count(double frequency, const ReadoutParams& readout) {
    const double ticks = std::round(readout.f_base / frequency);
    if (!(ticks < readout.saturation))
        return readout.saturation;
    return static_cast<std::uint32_t>(std::max(ticks, 1.0));
}

} // namespace

CounterPair measure_counters(const NeuronState& neuron, const NeuronParams& params,
                             const ReadoutParams& readout) {
    return {period_count(vco_frequency(params.vco_pos, neuron.v_cap), readout),
            period_count(vco_frequency(params.vco_neg, neuron.v_cap), readout)};
}

double counter_to_freq(std::uint32_t count, double f_base) {
    if (count == 0)
        throw std::invalid_argument("counter_to_freq: zero count");
    return f_base / count;
}

VoltageEstimate estimate_vcap(double f, double g, const NeuronParams& params) {
    const double v_f = params.vco_pos.invert(f);
    const double v_g = params.vco_neg.invert(g);
    const double avg = 0.5 * (v_f + v_g);

    VoltageEstimate est;
    if (avg > params.vco_neg.flat_threshold) {
        est = {v_f, EstimateSource::positive_only};
    } else if (avg < params.vco_pos.flat_threshold) {
        est = {v_g, EstimateSource::negative_only};
    } else {
        est = {avg, EstimateSource::average};
    }
    est.v_hat = std::clamp(est.v_hat, 0.0, params.v_cc);
    return est;
}

SampleFrame sample_all(const FabricState& state, const ReservoirConfig& config) {
    SampleFrame frame;
    frame.v_hat.reserve(state.neurons.size());
    frame.counters.reserve(state.neurons.size());
    const auto& p = config.neuron_params;
    const double f_base = config.readout.f_base;
    for (const auto& neuron : state.neurons) {
        const auto c = measure_counters(neuron, p, config.readout);
        frame.counters.push_back(c);
        frame.v_hat.push_back(
            estimate_vcap(counter_to_freq(c.c_f, f_base), counter_to_freq(c.c_g, f_base), p).v_hat);
    }
    return frame;
}

void write_frame_header(std::ostream& out, std::size_t neurons) {
    out << "sample";
    for (std::size_t i = 0; i < neurons; ++i)
        out << ",v" << i;
    for (std::size_t i = 0; i < neurons; ++i)
        out << ",cf" << i << ",cg" << i;
    out << '\n';
}

void write_frame_row(std::ostream& out, std::size_t sample_index, const SampleFrame& frame) {
    out << sample_index;
    for (double v : frame.v_hat)
        out << ',' << v;
    for (const auto& c : frame.counters)
        out << ',' << c.c_f << ',' << c.c_g;
    out << '\n';
}

} // namespace lifrc
