#pragma once

// Recursive least squares filter used by FORCE learning, in double precision
// and in a fixed-point form mirroring an FPGA datapath.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lifrc {

enum class Arithmetic : std::uint8_t { float64, fixed_point };

struct RlsState {
    Eigen::VectorXd w;  // output weights
    Eigen::MatrixXd p;  // recursion matrix
    double alpha = 1.0; // P(0) = alpha I
};

struct RlsUpdate {
    double epsilon = 0.0; // a-priori error z - x^T w(n-1)
    double z_p = 0.0;     // a-priori prediction x^T w(n-1)
};

/// w(0) = ones(n), P(0) = alpha I. Throws for n == 0 or alpha <= 0.
RlsState rls_init(std::size_t n, double alpha);

/// One RLS update on (x, z): gain = Px / (1 + x^T P x), P -= gain x^T P,
/// w += epsilon gain. P is re-symmetrized afterwards.
RlsUpdate rls_step(RlsState& state, const Eigen::Ref<const Eigen::VectorXd>& x, double z);

double predict(const RlsState& state, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Signed Q3.28 fixed point in 32-bit words, 64-bit accumulators, and an
/// unsigned divider for the gain normalisation.
class FixedPointRls {
public:
    static constexpr int kFracBits = 28;

    FixedPointRls(std::size_t n, double alpha);

    RlsUpdate step(const Eigen::Ref<const Eigen::VectorXd>& x, double z);
    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    std::size_t size() const { return n_; }
    Eigen::VectorXd weights() const;
    Eigen::MatrixXd recursion_matrix() const;

    /// Multiplications and divisions performed by the last step().
    std::uint64_t last_multiplies() const { return last_mults_; }
    std::uint64_t last_divisions() const { return last_divs_; }
    /// Words that saturated on conversion or write-back since construction.
    std::uint64_t saturations() const { return saturations_; }

    static std::int32_t to_fixed(double v);
    static double to_double(std::int64_t v);

private:
    std::int32_t quantize(double v);
    std::int32_t narrow(std::int64_t v);

    std::size_t n_;
    std::vector<std::int32_t> w_;
    std::vector<std::int32_t> p_; // row-major n x n
    std::vector<std::int32_t> xq_;
    std::vector<std::int64_t> px_;
    std::vector<std::int32_t> gain_;
    std::uint64_t last_mults_ = 0;
    std::uint64_t last_divs_ = 0;
    std::uint64_t saturations_ = 0;
};

/// Throughput of one RLS step on a multiplier-array accelerator.
struct AcceleratorReport {
    std::size_t neurons = 0;
    std::uint64_t multiplies_per_step = 0;
    std::uint64_t divisions_per_step = 0;
    std::size_t multipliers = 50;
    double clock_hz = 50e6;
    std::uint64_t cycles = 0;     // ceil(multiplies / multipliers) + divisions
    double step_time = 0.0;       // seconds
    double budget = 30e-6;        // seconds
    bool within_budget = false;
};

/// Multiply count of FixedPointRls::step for n inputs: 2n^2 + 3n.
std::uint64_t rls_multiplies(std::size_t n);

AcceleratorReport accelerator_report(std::size_t n, std::size_t multipliers = 50,
                                     double clock_hz = 50e6, double budget = 30e-6);

} // namespace lifrc
