#pragma once

// Open-loop learning: record reservoir states under a given input sequence,
// fit linear output weights by least squares, evaluate on held-out rows.

#include "lifrc/fabric.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace lifrc {

struct Recording {
    Eigen::MatrixXd states; // T x N voltage estimates
    std::vector<double> inputs;
    double ts = 0.0;
    std::uint64_t seed = 0;

    std::size_t samples() const { return inputs.size(); }
};

/// Drives a fresh fabric with u(n) for ts each and samples after every window.
Recording record(const ReservoirConfig& config, std::span<const double> inputs, double ts);

/// Header "n,u,x0..x{N-1}".
void write_recording_csv(std::ostream& out, const Recording& rec);

/// Half-open row interval tagged with its role, so train and test rows cannot
/// be passed where the other is expected.
template <class Tag>
struct Rows {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
};
using IgnoredRows = Rows<struct IgnoredTag>;
using TrainRows = Rows<struct TrainTag>;
using TestRows = Rows<struct TestTag>;

struct SplitPolicy {
    double ignore_frac = 0.10;
    double train_frac = 0.70;
    double test_frac = 0.20;

    void validate() const;
};

struct Split {
    IgnoredRows ignored;
    TrainRows train;
    TestRows test;
};

/// Contiguous ignore -> train -> test ranges with floor(T * cumulative
/// fraction) boundaries. Requires T >= 10.
Split split(std::size_t samples, const SplitPolicy& policy = {});

class IllConditioned : public std::runtime_error {
public:
    IllConditioned(double smallest_singular_value, const std::string& what)
        : std::runtime_error(what), sigma_min_(smallest_singular_value) {}
    double smallest_singular_value() const { return sigma_min_; }

private:
    double sigma_min_;
};

/// Ridge term added to X^T X.
struct Ridge {
    enum class Mode { none, relative, absolute };
    Mode mode = Mode::relative;
    double value = 1e-8; // relative: lambda = value * trace(X^T X) / N

    static Ridge none() { return {Mode::none, 0.0}; }
    static Ridge relative(double scale) { return {Mode::relative, scale}; }
    static Ridge absolute(double lambda) { return {Mode::absolute, lambda}; }
};

/// Normal-equation solver factorized once for a fixed design matrix, reused
/// across many targets.
class LeastSquares {
public:
    /// Throws IllConditioned when X^T X is numerically singular and no ridge
    /// is applied.
    LeastSquares(const Eigen::Ref<const Eigen::MatrixXd>& x, Ridge ridge = {});

    Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& z) const;
    double lambda() const { return lambda_; }

private:
    Eigen::MatrixXd x_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    // Without a ridge the normal equations are solved through a QR of X so the
    // conditioning of X is not squared.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
    double lambda_ = 0.0;
};

/// w = (X^T X + lambda I)^{-1} X^T Z.
Eigen::VectorXd lsm_fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& z, Ridge ridge = {});

/// z_P(n) = x(n)^T w for every row.
Eigen::VectorXd predict_series(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& w);

/// Readout trained on the train rows of one recording. Targets are full
/// length-T series; only their train rows are read by fit().
class Readout {
public:
    Readout(const Recording& rec, TrainRows train, Ridge ridge = {});

    Eigen::VectorXd fit(std::span<const double> target) const;
    Eigen::VectorXd predict(const Eigen::VectorXd& w, TestRows test) const;
    Eigen::VectorXd predict_all(const Eigen::VectorXd& w) const;

    const TrainRows& train() const { return train_; }

private:
    const Recording* rec_;
    TrainRows train_;
    LeastSquares solver_;
};

} // namespace lifrc
