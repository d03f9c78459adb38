#include "lifrc/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lifrc {

LinearVcoModel LinearVcoModel::default_positive() {
    return {1.3e6, -0.3e6, 0.35, FlatSide::below};
}

LinearVcoModel LinearVcoModel::default_negative() {
    return {-1.3e6, 1.0e6, 0.65, FlatSide::above};
}

double vco_frequency(const LinearVcoModel& model, double v_cap) {
    const bool flat = model.flat_side == FlatSide::below ? v_cap < model.flat_threshold
                                                         : v_cap > model.flat_threshold;
    const double v = flat ? model.flat_threshold : v_cap;
    return model.slope * v + model.intercept;
}

void NeuronParams::validate() const {
    if (!(v_cc > 0.0))
        throw std::invalid_argument("neuron: v_cc must be positive");
    if (!(v_rest > 0.0 && v_rest < v_cc))
        throw std::invalid_argument("neuron: v_rest must lie strictly between 0 and v_cc");
    if (!(tau_leak > 0.0))
        throw std::invalid_argument("neuron: tau_leak must be positive");
    if (!(eta > 0.0))
        throw std::invalid_argument("neuron: eta must be positive");
    for (const auto* m : {&vco_pos, &vco_neg}) {
        if (m->slope == 0.0)
            throw std::invalid_argument("neuron: VCO slope must be non-zero");
        if (!(vco_frequency(*m, 0.0) > 0.0) || !(vco_frequency(*m, v_cc) > 0.0))
            throw std::invalid_argument("neuron: VCO frequency must stay positive on [0, v_cc]");
    }
    if (vco_pos.slope < 0.0 || vco_pos.flat_side != FlatSide::below)
        throw std::invalid_argument("neuron: positive VCO must rise with v_cap and be flat below");
    if (vco_neg.slope > 0.0 || vco_neg.flat_side != FlatSide::above)
        throw std::invalid_argument("neuron: negative VCO must fall with v_cap and be flat above");
}

NeuronState apply_pulse(NeuronState state, const NeuronParams& params, Polarity polarity,
                        double width) {
    if (width < 0.0)
        throw std::invalid_argument("apply_pulse: negative pulse width");
    const double dv = params.eta * width;
    state.v_cap += polarity == Polarity::excitation ? dv : -dv;
    state.v_cap = std::clamp(state.v_cap, 0.0, params.v_cc);
    return state;
}

double leak_factor(const NeuronParams& params, double dt) {
    if (dt < 0.0)
        throw std::invalid_argument("leak: negative time step");
    return std::exp(-dt / params.tau_leak);
}

NeuronState leak(NeuronState state, const NeuronParams& params, double dt) {
    return relax(state, params, leak_factor(params, dt));
}

} // namespace lifrc
