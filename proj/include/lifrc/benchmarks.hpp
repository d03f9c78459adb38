#pragma once

// Benchmark targets and scores: linear memory capacity, non-linear memory
// capacity over Legendre products, NARMA10, and the MSE family.

#include "lifrc/open_loop.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lifrc {

struct TruncatedNormal {
    double mu = 0.0;
    double sigma = 0.5;
    double lo = -1.0;
    double hi = 1.0;
};

struct Uniform {
    double lo = -1.0;
    double hi = 1.0;
};

struct InputSequenceSpec {
    std::size_t length = 0;
    std::variant<TruncatedNormal, Uniform> distribution = TruncatedNormal{};
    std::uint64_t seed = 0;
};

/// Seeded input sequence; truncation is done by rejection.
std::vector<double> gen_input(const InputSequenceSpec& spec);

/// z(n) = u(n-k), zero for n < k. k >= 1.
std::vector<double> mc_target(std::span<const double> u, std::size_t k);

struct Score {
    double value = 0.0;
    bool degenerate = false; // a zero-variance or zero-energy series was involved
};

/// Squared correlation cov^2 / (var var), clamped to [0, 1].
Score capacity(std::span<const double> z, std::span<const double> z_p);

/// Legendre polynomial P_d(x) by the three-term recurrence; |x| <= 1.
double legendre(int degree, double x);

/// Delay -> degree map, listed with the largest delay first.
class DegreeString {
public:
    DegreeString() = default;
    /// Entries (delay, degree) with distinct delays >= 1 and degrees >= 1.
    explicit DegreeString(std::vector<std::pair<std::size_t, int>> entries);

    const std::vector<std::pair<std::size_t, int>>& entries() const { return entries_; }
    int total_degree() const;
    std::size_t max_delay() const { return entries_.empty() ? 0 : entries_.front().first; }
    std::string to_string() const;

    friend bool operator==(const DegreeString&, const DegreeString&) = default;

private:
    std::vector<std::pair<std::size_t, int>> entries_;
};

/// z(n) = prod_k P_{d_k}(u(n-k)); rows with n - k < 0 for any entry are 0.
std::vector<double> nlmc_target(std::span<const double> u, const DegreeString& ds);

/// 1 - MSE / mean(z^2), clamped to [0, 1].
Score nlmc_capacity(std::span<const double> z, std::span<const double> z_p);

class TargetDiverged : public std::runtime_error {
public:
    explicit TargetDiverged(std::size_t index)
        : std::runtime_error("NARMA10 target diverged at sample " + std::to_string(index)),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Tenth-order NARMA recurrence, z(0..9) = 0. Throws TargetDiverged when any
/// |z(n)| exceeds `bound`.
std::vector<double> narma10_target(std::span<const double> u, double bound = 1.0);

/// Raised when no input seed within the regeneration limit gives a bounded
/// NARMA10 target.
class RegenerationLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Metrics {
    double mse = 0.0;
    double rmse = 0.0;
    std::optional<double> nrmse; // unset when mean(z) == 0
};

Metrics metrics(std::span<const double> z, std::span<const double> z_p);

/// Pearson correlation; unset when either series has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Benchmark drivers

struct OpenLoopOptions {
    double ts = 120e-6;
    SplitPolicy split{};
    Ridge ridge{};
};

struct TracePoint {
    std::size_t n;
    double u;
    double z;
    double z_p;
    const char* split; // "ignore" | "train" | "test"
};

struct McResult {
    std::vector<Score> mc_k; // index 0 is k = 1
    double total_mc = 0.0;
    std::vector<std::vector<TracePoint>> traces; // per k, only for k in trace_delays
    std::vector<std::size_t> trace_delays;
    std::vector<Eigen::VectorXd> weights; // per k, same indexing as mc_k
};

struct McOptions : OpenLoopOptions {
    std::size_t k_max = 30;
    std::vector<std::size_t> trace_delays{1, 3};
};

/// Linear memory capacity on an existing recording.
McResult mc_evaluate(const Recording& rec, const McOptions& options = {});
McResult mc_benchmark(const ReservoirConfig& config, const InputSequenceSpec& input,
                      const McOptions& options = {});

struct NlmcOptions : OpenLoopOptions {
    int d_max = 15;
    std::size_t delay_margin = 30;   // delays range over [1, d + delay_margin]
    std::size_t max_distinct_delays = 3;
    std::size_t family_limit = 2000; // strings evaluated per degree
};

struct DegreeResult {
    int degree = 0;
    double max_capacity = 0.0;
    DegreeString argmax;
    std::size_t evaluated = 0;
    std::size_t overflow = 0; // strings beyond family_limit, not evaluated
};

struct NlmcResult {
    std::vector<DegreeResult> per_degree; // index 0 is d = 1
    double linear_peak = 0.0;             // max_k MC_k on the same recording
};

/// Degree strings of total degree d with at most `max_distinct` delays in
/// [1, max_delay], ordered by largest delay, then lexicographically.
std::vector<DegreeString> enumerate_degree_strings(int degree, std::size_t max_delay,
                                                   std::size_t max_distinct);

NlmcResult nlmc_evaluate(const Recording& rec, const NlmcOptions& options = {});
NlmcResult nlmc_benchmark(const ReservoirConfig& config, const InputSequenceSpec& input,
                          const NlmcOptions& options = {});

struct NarmaOptions : OpenLoopOptions {
    /// Factor applied to u before the NARMA recurrence; the reservoir itself
    /// is driven with the unscaled u in [0, 1].
    double target_input_scale = 0.5;
    double divergence_bound = 1.0;
    std::size_t max_regenerations = 100;
};

struct NarmaResult {
    Metrics test;
    Metrics train;
    std::vector<TracePoint> trace;
    Eigen::VectorXd weights;
    std::uint64_t input_seed = 0; // seed that produced a bounded target
    std::size_t regenerations = 0;
};

NarmaResult narma10_benchmark(const ReservoirConfig& config, const InputSequenceSpec& input,
                              const NarmaOptions& options = {});

} // namespace lifrc
