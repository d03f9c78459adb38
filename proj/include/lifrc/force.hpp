#pragma once

// FORCE closed-loop learning: the readout output is fed back as the reservoir
// input every sample while RLS adapts the weights during teaching.

#include "lifrc/fabric.hpp"
#include "lifrc/rls.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace lifrc {

struct ForceOptions {
    double freq_hz = 220.0;
    double amplitude = 1.0;
    double ts = 50e-6;
    double teach_cycles = 15;
    double test_cycles = 5;
    double alpha = 1.0;
    Arithmetic arithmetic = Arithmetic::float64;
    double feedback_clamp = 1.0;
    std::vector<std::size_t> probes{0, 1, 2, 3}; // neurons recorded in the trace
};

enum class ForcePhase : std::uint8_t { teach, test };

struct ForceSample {
    std::size_t n = 0;
    double z = 0.0;
    double z_p = 0.0;
    std::optional<double> epsilon; // teaching only
    ForcePhase phase = ForcePhase::teach;
    std::vector<double> probes;
};

struct ForceResult {
    std::vector<ForceSample> trace;
    std::optional<double> correlation; // unset when degenerate
    bool degenerate = false;
    std::size_t teach_samples = 0;
    std::size_t test_samples = 0;
    std::size_t clamped = 0;           // samples whose feedback hit the clamp
    Eigen::VectorXd weights_after_teach;
    Eigen::VectorXd weights_after_test;
};

/// Sine teaching signal z(n) = A sin(2 pi f n ts), n = 1, 2, ...
/// Throws if 1/ts < 10 f.
ForceResult force_run(const ReservoirConfig& config, const ForceOptions& options = {});

/// Header "n,z,z_p,epsilon,phase,probe..."; epsilon is empty during test.
void write_force_csv(std::ostream& out, const ForceResult& result,
                     const std::vector<std::size_t>& probes);

} // namespace lifrc
