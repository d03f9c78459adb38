#include "lifrc/rls.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lifrc {

RlsState rls_init(std::size_t n, double alpha) {
    if (n == 0)
        throw std::invalid_argument("rls_init: empty network");
    if (!(alpha > 0.0))
        throw std::invalid_argument("rls_init: alpha must be positive");
    const auto size = static_cast<Eigen::Index>(n);
    return {Eigen::VectorXd::Ones(size), alpha * Eigen::MatrixXd::Identity(size, size), alpha};
}

double predict(const RlsState& state, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != state.w.size())
        throw std::invalid_argument("predict: state vector has wrong length");
    return x.dot(state.w);
}

RlsUpdate rls_step(RlsState& state, const Eigen::Ref<const Eigen::VectorXd>& x, double z) {
    if (x.size() != state.w.size())
        throw std::invalid_argument("rls_step: state vector has wrong length");
    RlsUpdate out;
    out.z_p = x.dot(state.w);
    out.epsilon = z - out.z_p;

    const Eigen::VectorXd px = state.p * x;
    const Eigen::VectorXd gain = px / (1.0 + x.dot(px));
    const Eigen::RowVectorXd xtp = x.transpose() * state.p;
    state.p.noalias() -= gain * xtp;
    state.p = 0.5 * (state.p + state.p.transpose()).eval();
    state.w += out.epsilon * gain;
    return out;
}

// --- fixed point -----------------------------------------------------------

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr std::int64_t kOne = std::int64_t{1} << FixedPointRls::kFracBits;

// Rounded arithmetic shift right by the fraction width.
inline std::int64_t rescale(i128 product) {
    const i128 half = i128{1} << (FixedPointRls::kFracBits - 1);
    return static_cast<std::int64_t>((product + half) >> FixedPointRls::kFracBits);
}

} // namespace

std::int32_t FixedPointRls::to_fixed(double v) {
    const double scaled = std::round(v * static_cast<double>(kOne));
    if (scaled >= static_cast<double>(std::numeric_limits<std::int32_t>::max()))
        return std::numeric_limits<std::int32_t>::max();
    if (scaled <= static_cast<double>(std::numeric_limits<std::int32_t>::min()))
        return std::numeric_limits<std::int32_t>::min();
    return static_cast<std::int32_t>(scaled);
}

double FixedPointRls::to_double(std::int64_t v) {
    return static_cast<double>(v) / static_cast<double>(kOne);
}

std::int32_t FixedPointRls::quantize(double v) {
    const auto q = to_fixed(v);
    if (q == std::numeric_limits<std::int32_t>::max() || q == std::numeric_limits<std::int32_t>::min())
        ++saturations_;
    return q;
}

std::int32_t FixedPointRls::narrow(std::int64_t v) {
    if (v > std::numeric_limits<std::int32_t>::max()) {
        ++saturations_;
        return std::numeric_limits<std::int32_t>::max();
    }
    if (v < std::numeric_limits<std::int32_t>::min()) {
        ++saturations_;
        return std::numeric_limits<std::int32_t>::min();
    }
    return static_cast<std::int32_t>(v);
}

FixedPointRls::FixedPointRls(std::size_t n, double alpha)
    : n_(n), w_(n), p_(n * n, 0), xq_(n), px_(n), gain_(n) {
    if (n == 0)
        throw std::invalid_argument("fixed-point RLS: empty network");
    if (!(alpha > 0.0))
        throw std::invalid_argument("fixed-point RLS: alpha must be positive");
    const auto a = quantize(alpha);
    for (std::size_t i = 0; i < n; ++i) {
        w_[i] = static_cast<std::int32_t>(kOne);
        p_[i * n + i] = a;
    }
}

double FixedPointRls::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (static_cast<std::size_t>(x.size()) != n_)
        throw std::invalid_argument("fixed-point RLS: state vector has wrong length");
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n_; ++i)
        acc += rescale(i128{w_[i]} * to_fixed(x[static_cast<Eigen::Index>(i)]));
    return to_double(acc);
}

RlsUpdate FixedPointRls::step(const Eigen::Ref<const Eigen::VectorXd>& x, double z) {
    if (static_cast<std::size_t>(x.size()) != n_)
        throw std::invalid_argument("fixed-point RLS: state vector has wrong length");
    const std::size_t n = n_;
    std::uint64_t mults = 0, divs = 0;

    for (std::size_t i = 0; i < n; ++i)
        xq_[i] = quantize(x[static_cast<Eigen::Index>(i)]);

    std::int64_t zp = 0;
    for (std::size_t i = 0; i < n; ++i)
        zp += rescale(i128{w_[i]} * xq_[i]);
    mults += n;
    const std::int64_t eps = std::int64_t{quantize(z)} - zp;

    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t acc = 0;
        const std::int32_t* row = &p_[i * n];
        for (std::size_t j = 0; j < n; ++j)
            acc += rescale(i128{row[j]} * xq_[j]);
        px_[i] = acc;
    }
    mults += n * n;

    std::int64_t xpx = 0;
    for (std::size_t i = 0; i < n; ++i)
        xpx += rescale(i128{px_[i]} * xq_[i]);
    mults += n;
    const std::int64_t denom = kOne + xpx;
    if (denom <= 0)
        throw std::runtime_error("fixed-point RLS: non-positive gain denominator");

    for (std::size_t i = 0; i < n; ++i) {
        const bool negative = px_[i] < 0;
        const u128 magnitude = static_cast<u128>(negative ? -i128{px_[i]} : i128{px_[i]});
        const u128 num = (magnitude << kFracBits) + static_cast<u128>(denom / 2);
        const auto q = static_cast<std::int64_t>(num / static_cast<u128>(denom));
        gain_[i] = narrow(negative ? -q : q);
    }
    divs += n;

    // P is symmetric, so x^T P equals (P x)^T.
    for (std::size_t i = 0; i < n; ++i) {
        std::int32_t* row = &p_[i * n];
        for (std::size_t j = 0; j < n; ++j)
            row[j] = narrow(std::int64_t{row[j]} - rescale(i128{gain_[i]} * px_[j]));
    }
    mults += n * n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::int64_t sum = std::int64_t{p_[i * n + j]} + p_[j * n + i];
            const auto avg = static_cast<std::int32_t>(sum >= 0 ? (sum + 1) / 2 : -((-sum + 1) / 2));
            p_[i * n + j] = avg;
            p_[j * n + i] = avg;
        }

    for (std::size_t i = 0; i < n; ++i)
        w_[i] = narrow(std::int64_t{w_[i]} + rescale(i128{eps} * gain_[i]));
    mults += n;

    last_mults_ = mults;
    last_divs_ = divs;
    return {to_double(eps), to_double(zp)};
}

Eigen::VectorXd FixedPointRls::weights() const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i)
        w[static_cast<Eigen::Index>(i)] = to_double(w_[i]);
    return w;
}

Eigen::MatrixXd FixedPointRls::recursion_matrix() const {
    const auto size = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd p(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
        for (Eigen::Index j = 0; j < size; ++j)
            p(i, j) = to_double(p_[static_cast<std::size_t>(i * size + j)]);
    return p;
}

std::uint64_t rls_multiplies(std::size_t n) {
    return 2 * std::uint64_t{n} * n + 3 * std::uint64_t{n};
}

AcceleratorReport accelerator_report(std::size_t n, std::size_t multipliers, double clock_hz,
                                     double budget) {
    if (multipliers == 0 || !(clock_hz > 0.0))
        throw std::invalid_argument("accelerator_report: need multipliers and a clock");
    AcceleratorReport r;
    r.neurons = n;
    r.multiplies_per_step = rls_multiplies(n);
    r.divisions_per_step = n;
    r.multipliers = multipliers;
    r.clock_hz = clock_hz;
    r.budget = budget;
    r.cycles = (r.multiplies_per_step + multipliers - 1) / multipliers + r.divisions_per_step;
    r.step_time = static_cast<double>(r.cycles) / clock_hz;
    r.within_budget = r.step_time <= budget;
    return r;
}

} // namespace lifrc
