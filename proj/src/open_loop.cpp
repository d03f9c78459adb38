#include "lifrc/open_loop.hpp"

#include "lifrc/readout.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace lifrc {

Recording record(const ReservoirConfig& config, std::span<const double> inputs, double ts) {
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (!(std::abs(inputs[i]) <= 1.0))
            throw std::invalid_argument("record: input " + std::to_string(i) + " outside [-1, 1]");

    const Fabric fabric(config);
    Recording rec;
    rec.ts = ts;
    rec.seed = config.seed;
    rec.inputs.assign(inputs.begin(), inputs.end());
    rec.states.resize(static_cast<Eigen::Index>(inputs.size()),
                      static_cast<Eigen::Index>(config.neurons()));
    fabric.steps_per_sample(ts);

    auto state = fabric.initial_state();
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        fabric.run_until_sample(state, inputs[n], ts);
        const auto frame = sample_all(state, config);
        for (std::size_t i = 0; i < frame.v_hat.size(); ++i)
            rec.states(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = frame.v_hat[i];
    }
    return rec;
}

void write_recording_csv(std::ostream& out, const Recording& rec) {
    out << "n,u";
    for (Eigen::Index i = 0; i < rec.states.cols(); ++i)
        out << ",x" << i;
    out << '\n';
    for (std::size_t n = 0; n < rec.samples(); ++n) {
        out << n << ',' << rec.inputs[n];
        for (Eigen::Index i = 0; i < rec.states.cols(); ++i)
            out << ',' << rec.states(static_cast<Eigen::Index>(n), i);
        out << '\n';
    }
}

void SplitPolicy::validate() const {
    if (ignore_frac < 0.0 || train_frac < 0.0 || test_frac < 0.0)
        throw std::invalid_argument("split: fractions must be non-negative");
    if (std::abs(ignore_frac + train_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must sum to 1");
}

Split split(std::size_t samples, const SplitPolicy& policy) {
    policy.validate();
    if (samples < 10)
        throw std::invalid_argument("split: need at least 10 samples");
    // The epsilon absorbs representation error in sums such as 0.1 + 0.7.
    auto boundary = [&](double frac) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(samples) * frac + 1e-9));
    };
    const std::size_t a = boundary(policy.ignore_frac);
    const std::size_t b = boundary(policy.ignore_frac + policy.train_frac);
    return {{0, a}, {a, b}, {b, samples}};
}

LeastSquares::LeastSquares(const Eigen::Ref<const Eigen::MatrixXd>& x, Ridge ridge) : x_(x) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    switch (ridge.mode) {
    case Ridge::Mode::none:
        lambda_ = 0.0;
        break;
    case Ridge::Mode::relative:
        lambda_ = n > 0 ? ridge.value * gram.trace() / static_cast<double>(n) : 0.0;
        break;
    case Ridge::Mode::absolute:
        lambda_ = ridge.value;
        break;
    }
    if (lambda_ < 0.0)
        throw std::invalid_argument("least squares: negative ridge");

    if (lambda_ == 0.0) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        const double lo = std::max(eig.eigenvalues().minCoeff(), 0.0);
        const double hi = eig.eigenvalues().maxCoeff();
        const double sigma_min = std::sqrt(lo);
        if (x.rows() < n || !(lo > hi * 1e-13))
            throw IllConditioned(sigma_min, "X^T X is singular or ill-conditioned (smallest singular value " +
                                                std::to_string(sigma_min) + ")");
        qr_.compute(x);
        return;
    }
    gram.diagonal().array() += lambda_;
    llt_.compute(gram);
    if (llt_.info() != Eigen::Success)
        throw IllConditioned(0.0, "X^T X is not positive definite");
}

Eigen::VectorXd LeastSquares::solve(const Eigen::Ref<const Eigen::VectorXd>& z) const {
    if (z.size() != x_.rows())
        throw std::invalid_argument("least squares: target length does not match design rows");
    if (lambda_ == 0.0)
        return qr_.solve(z);
    return llt_.solve(x_.transpose() * z);
}

Eigen::VectorXd lsm_fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& z, Ridge ridge) {
    if (x.rows() != z.size())
        throw std::invalid_argument("lsm_fit: row count does not match target length");
    return LeastSquares(x, ridge).solve(z);
}

Eigen::VectorXd predict_series(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& w) {
    if (x.cols() != w.size())
        throw std::invalid_argument("predict_series: weight length does not match state width");
    return x * w;
}

namespace {

Eigen::MatrixXd train_block(const Recording& rec, TrainRows train) {
    if (train.end > rec.samples() || train.begin > train.end)
        throw std::invalid_argument("readout: train rows outside recording");
    return rec.states.middleRows(static_cast<Eigen::Index>(train.begin),
                                 static_cast<Eigen::Index>(train.size()));
}

} // namespace

Readout::Readout(const Recording& rec, TrainRows train, Ridge ridge)
    : rec_(&rec), train_(train), solver_(train_block(rec, train), ridge) {}

Eigen::VectorXd Readout::fit(std::span<const double> target) const {
    if (target.size() != rec_->samples())
        throw std::invalid_argument("readout: target length does not match recording");
    const Eigen::Map<const Eigen::VectorXd> z(target.data() + train_.begin,
                                              static_cast<Eigen::Index>(train_.size()));
    return solver_.solve(z);
}

Eigen::VectorXd Readout::predict(const Eigen::VectorXd& w, TestRows test) const {
    if (test.end > rec_->samples() || test.begin > test.end)
        throw std::invalid_argument("readout: test rows outside recording");
    return predict_series(rec_->states.middleRows(static_cast<Eigen::Index>(test.begin),
                                                  static_cast<Eigen::Index>(test.size())),
                          w);
}

Eigen::VectorXd Readout::predict_all(const Eigen::VectorXd& w) const {
    return predict_series(rec_->states, w);
}

} // namespace lifrc
