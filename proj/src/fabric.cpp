#include "lifrc/fabric.hpp"

#include "lifrc/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lifrc {

ConnectionEntry ConnectionEntry::excite(int weight) {
    if (weight < 0 || weight > kMaxWeight)
        throw std::invalid_argument("connection weight out of range: " + std::to_string(weight));
    return {ConnectionKind::excitation, static_cast<std::uint8_t>(weight)};
}

ConnectionEntry ConnectionEntry::inhibit(int weight) {
    if (weight < 0 || weight > kMaxWeight)
        throw std::invalid_argument("connection weight out of range: " + std::to_string(weight));
    return {ConnectionKind::inhibition, static_cast<std::uint8_t>(weight)};
}

const ConnectionEntry& ConnectivityMatrix::at(std::size_t dst, std::size_t src) const {
    if (dst >= n_ || src >= n_ + 2)
        throw std::out_of_range("connectivity index out of range");
    return entries_[dst * (n_ + 2) + src];
}

void ConnectivityMatrix::set(std::size_t dst, std::size_t src, ConnectionEntry entry) {
    if (dst >= n_ || src >= n_ + 2)
        throw std::out_of_range("connectivity index out of range");
    entries_[dst * (n_ + 2) + src] = entry;
}

std::size_t ConnectivityMatrix::connection_count() const {
    std::size_t count = 0;
    for (const auto& e : entries_)
        count += e.connected() ? 1 : 0;
    return count;
}

double weight_to_width(int weight, double delay_unit) {
    if (weight < 0 || weight > kMaxWeight)
        throw std::invalid_argument("weight_to_width: weight out of range: " +
                                    std::to_string(weight));
    return (weight + 1) * delay_unit;
}

std::pair<double, double> input_frequencies(double u, double max_freq) {
    if (!(std::abs(u) <= 1.0))
        throw std::invalid_argument("input_frequencies: |u| must not exceed 1");
    if (u > 0.0)
        return {max_freq * u, 0.0};
    if (u < 0.0)
        return {0.0, max_freq * -u};
    return {0.0, 0.0};
}

Fabric::Fabric(ReservoirConfig config) : config_(std::move(config)) {
    const auto violations = validate(config_);
    if (!violations.empty())
        throw std::invalid_argument("invalid reservoir config: " + violations.front().message);

    const auto& m = config_.matrix;
    decay_ = leak_factor(config_.neuron_params, config_.microstep);
    fanout_.assign(m.sources(), {});
    for (std::size_t src = 0; src < m.sources(); ++src) {
        for (std::size_t dst = 0; dst < m.neurons(); ++dst) {
            const auto& e = m.at(dst, src);
            if (e.connected())
                fanout_[src].push_back({static_cast<std::uint32_t>(dst), e.polarity(),
                                        weight_to_width(e.weight, config_.delay_unit)});
        }
    }
    edges_.assign(m.sources(), 0);
}

FabricState Fabric::initial_state() const {
    FabricState state;
    state.rng.seed(config_.seed);
    std::uniform_real_distribution<double> phase(0.0, 1.0);
    state.neurons.resize(config_.neurons());
    for (auto& n : state.neurons) {
        n.v_cap = config_.neuron_params.v_rest;
        n.phase_pos = phase(state.rng);
        n.phase_neg = phase(state.rng);
    }
    state.input_phase_exc = phase(state.rng);
    state.input_phase_inh = phase(state.rng);
    return state;
}

namespace {

// Advances a phase accumulator and returns the number of wraps.
inline std::uint32_t accumulate(double& phase, double increment) {
    phase += increment;
    if (phase < 1.0)
        return 0;
    const double wraps = std::floor(phase);
    phase -= wraps;
    return static_cast<std::uint32_t>(wraps);
}

} // namespace

void Fabric::advance_microstep(FabricState& state, double u) const {
    const auto& p = config_.neuron_params;
    const double dt = config_.microstep;
    const std::size_t n = state.neurons.size();

    for (std::size_t i = 0; i < n; ++i) {
        auto& neuron = state.neurons[i];
        edges_[i] = accumulate(neuron.phase_pos, vco_frequency(p.vco_pos, neuron.v_cap) * dt);
        accumulate(neuron.phase_neg, vco_frequency(p.vco_neg, neuron.v_cap) * dt);
    }
    const auto [f_exc, f_inh] = input_frequencies(u, config_.input_max_freq);
    edges_[n] = accumulate(state.input_phase_exc, f_exc * dt);
    edges_[n + 1] = accumulate(state.input_phase_inh, f_inh * dt);

    for (std::size_t src = 0; src < n + 2; ++src) {
        for (std::uint32_t k = 0; k < edges_[src]; ++k) {
            for (const auto& t : fanout_[src]) {
                auto& dst = state.neurons[t.dst];
                dst = apply_pulse(dst, p, t.polarity, t.width);
            }
        }
    }

    for (auto& neuron : state.neurons)
        neuron = relax(neuron, p, decay_);

    ++state.microsteps;
    state.sim_time = static_cast<double>(state.microsteps) * dt;
}

std::size_t Fabric::steps_per_sample(double t_s) const {
    const double ratio = t_s / config_.microstep;
    const double steps = std::round(ratio);
    if (!(steps >= 1.0) || std::abs(ratio - steps) > 1e-6 * steps)
        throw std::invalid_argument("sample window must be a positive integer multiple of the microstep");
    return static_cast<std::size_t>(steps);
}

void Fabric::run_until_sample(FabricState& state, double u, double t_s) const {
    const std::size_t steps = steps_per_sample(t_s);
    for (std::size_t s = 0; s < steps; ++s)
        advance_microstep(state, u);

    if (config_.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, config_.noise_sigma);
        const double v_cc = config_.neuron_params.v_cc;
        for (auto& neuron : state.neurons)
            neuron.v_cap = std::clamp(neuron.v_cap + noise(state.rng), 0.0, v_cc);
    }
}

} // namespace lifrc
