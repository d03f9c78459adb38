#pragma once

// Behavioral model of a single VCO-coupled leaky integrate-and-fire neuron.

#include <cstdint>

namespace lifrc {

enum class FlatSide : std::uint8_t { below, above };

enum class Polarity : std::uint8_t { excitation, inhibition };

/// Piecewise-linear voltage-to-frequency map of one ring-oscillator VCO.
///
/// On the active side of `flat_threshold` the frequency is
/// `slope * v + intercept`; on the flat side it is pinned to the value at
/// the threshold.
struct LinearVcoModel {
    double slope = 0.0;          // Hz per volt
    double intercept = 0.0;      // Hz
    double flat_threshold = 0.0; // volts
    FlatSide flat_side = FlatSide::below;

    /// Positive VCO: 1.3 MHz/V, -0.3 MHz, flat below 0.35 V (1 MHz at 1 V).
    static LinearVcoModel default_positive();
    /// Negative VCO: -1.3 MHz/V, 1.0 MHz, flat above 0.65 V (1 MHz at 0 V).
    static LinearVcoModel default_negative();

    /// Inverse of the linear part, ignoring the flat region.
    double invert(double frequency) const { return (frequency - intercept) / slope; }
};

struct NeuronParams {
    double v_cc = 1.0;
    double v_rest = 0.5;
    double tau_leak = 2e-3; // seconds
    double eta = 5e4;       // volts per second of pulse width
    LinearVcoModel vco_pos = LinearVcoModel::default_positive();
    LinearVcoModel vco_neg = LinearVcoModel::default_negative();

    /// Throws std::invalid_argument when an invariant does not hold.
    void validate() const;
};

struct NeuronState {
    double v_cap = 0.5;
    double phase_pos = 0.0;
    double phase_neg = 0.0;

    bool operator==(const NeuronState&) const = default;
};

/// Injects (excitation) or removes (inhibition) eta*width volts, clamped to
/// the rails. A zero width is the identity.
NeuronState apply_pulse(NeuronState state, const NeuronParams& params, Polarity polarity,
                        double width);

/// Exponential relaxation toward v_rest over `dt` seconds.
NeuronState leak(NeuronState state, const NeuronParams& params, double dt);

/// Decay factor exp(-dt/tau_leak), for callers that leak many times with one dt.
double leak_factor(const NeuronParams& params, double dt);

/// Leak with a precomputed factor from leak_factor().
inline NeuronState relax(NeuronState state, const NeuronParams& params, double factor) {
    state.v_cap = params.v_rest + (state.v_cap - params.v_rest) * factor;
    return state;
}

double vco_frequency(const LinearVcoModel& model, double v_cap);

} // namespace lifrc
