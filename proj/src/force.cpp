#include "lifrc/force.hpp"

#include "lifrc/benchmarks.hpp"
#include "lifrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <variant>

namespace lifrc {

namespace {

// Float and fixed-point filters behind one interface.
class Filter {
public:
    Filter(std::size_t n, double alpha, Arithmetic mode) {
        if (mode == Arithmetic::float64)
            impl_ = rls_init(n, alpha);
        else
            impl_ = FixedPointRls(n, alpha);
    }

    RlsUpdate step(const Eigen::VectorXd& x, double z) {
        if (auto* s = std::get_if<RlsState>(&impl_))
            return rls_step(*s, x, z);
        return std::get<FixedPointRls>(impl_).step(x, z);
    }

    double predict(const Eigen::VectorXd& x) const {
        if (const auto* s = std::get_if<RlsState>(&impl_))
            return lifrc::predict(*s, x);
        return std::get<FixedPointRls>(impl_).predict(x);
    }

    Eigen::VectorXd weights() const {
        if (const auto* s = std::get_if<RlsState>(&impl_))
            return s->w;
        return std::get<FixedPointRls>(impl_).weights();
    }

private:
    std::variant<RlsState, FixedPointRls> impl_;
};

} // namespace

ForceResult force_run(const ReservoirConfig& config, const ForceOptions& options) {
    if (!(options.freq_hz > 0.0) || !(options.ts > 0.0))
        throw std::invalid_argument("force_run: frequency and sample period must be positive");
    if (1.0 / options.ts < 10.0 * options.freq_hz)
        throw std::invalid_argument("force_run: sampling rate below 10x the teaching frequency");
    if (options.teach_cycles < 0 || options.test_cycles < 0)
        throw std::invalid_argument("force_run: negative cycle count");
    for (auto p : options.probes)
        if (p >= config.neurons())
            throw std::invalid_argument("force_run: probe neuron out of range");

    const Fabric fabric(config);
    const std::size_t n_neurons = config.neurons();
    const double per_cycle = 1.0 / (options.freq_hz * options.ts);

    ForceResult result;
    result.teach_samples = static_cast<std::size_t>(std::lround(options.teach_cycles * per_cycle));
    result.test_samples = static_cast<std::size_t>(std::lround(options.test_cycles * per_cycle));
    const std::size_t total = result.teach_samples + result.test_samples;
    result.trace.reserve(total);

    Filter filter(n_neurons, options.alpha, options.arithmetic);
    auto state = fabric.initial_state();
    Eigen::VectorXd x(static_cast<Eigen::Index>(n_neurons));
    double previous = 0.0;

    for (std::size_t n = 1; n <= total; ++n) {
        double u = previous;
        if (std::abs(u) > options.feedback_clamp) {
            u = std::clamp(u, -options.feedback_clamp, options.feedback_clamp);
            ++result.clamped;
        }
        fabric.run_until_sample(state, std::clamp(u, -1.0, 1.0), options.ts);
        const auto frame = sample_all(state, config);
        for (std::size_t i = 0; i < n_neurons; ++i)
            x[static_cast<Eigen::Index>(i)] = frame.v_hat[i];

        ForceSample s;
        s.n = n;
        s.z = options.amplitude *
              std::sin(2.0 * std::numbers::pi * options.freq_hz * static_cast<double>(n) * options.ts);
        if (n <= result.teach_samples) {
            const auto upd = filter.step(x, s.z);
            s.z_p = upd.z_p;
            s.epsilon = upd.epsilon;
            s.phase = ForcePhase::teach;
        } else {
            s.z_p = filter.predict(x);
            s.phase = ForcePhase::test;
        }
        if (n == result.teach_samples)
            result.weights_after_teach = filter.weights();
        for (auto p : options.probes)
            s.probes.push_back(frame.v_hat[p]);
        if (!std::isfinite(s.z_p))
            throw std::runtime_error("force_run: non-finite output");
        previous = s.z_p;
        result.trace.push_back(std::move(s));
    }
    if (result.teach_samples == 0)
        result.weights_after_teach = filter.weights();
    result.weights_after_test = filter.weights();

    std::vector<double> z, zp;
    for (const auto& s : result.trace)
        if (s.phase == ForcePhase::test) {
            z.push_back(s.z);
            zp.push_back(s.z_p);
        }
    result.correlation = pearson(z, zp);
    result.degenerate = !result.correlation.has_value();
    return result;
}

void write_force_csv(std::ostream& out, const ForceResult& result,
                     const std::vector<std::size_t>& probes) {
    out << "n,z,z_p,epsilon,phase";
    for (auto p : probes)
        out << ",x" << p;
    out << '\n';
    for (const auto& s : result.trace) {
        out << s.n << ',' << s.z << ',' << s.z_p << ',';
        if (s.epsilon)
            out << *s.epsilon;
        out << ',' << (s.phase == ForcePhase::teach ? "teach" : "test");
        for (double v : s.probes)
            out << ',' << v;
        out << '\n';
    }
}

} // namespace lifrc
