#pragma once

// Reference implementations used only by the tests. Each one takes a
// different computational route from the library code it checks.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// Gaussian elimination with partial pivoting on plain vectors.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (a[pivot][col] == 0.0)
            throw std::runtime_error("oracle: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c)
            s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Batch equivalent of an RLS run started at w0 with P(0) = alpha I:
// w0 + (X^T X + I/alpha)^{-1} X^T (z - X w0).
inline Eigen::VectorXd rls_batch(const Eigen::MatrixXd& x, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& w0, double alpha) {
    const auto n = static_cast<std::size_t>(x.cols());
    const auto t = static_cast<std::size_t>(x.rows());
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (std::size_t r = 0; r < t; ++r) {
        double resid = z[static_cast<Eigen::Index>(r)];
        for (std::size_t c = 0; c < n; ++c)
            resid -= x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                     w0[static_cast<Eigen::Index>(c)];
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
            b[i] += xi * resid;
            for (std::size_t j = 0; j < n; ++j)
                a[i][j] += xi * x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        a[i][i] += 1.0 / alpha;
    const auto delta = solve_dense(std::move(a), std::move(b));
    Eigen::VectorXd w = w0;
    for (std::size_t i = 0; i < n; ++i)
        w[static_cast<Eigen::Index>(i)] += delta[i];
    return w;
}

// Least squares through the SVD pseudo-inverse.
inline Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& z) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::VectorXd uz = svd.matrixU().transpose() * z;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        uz[i] = s[i] > 1e-300 ? uz[i] / s[i] : 0.0;
    return svd.matrixV() * uz;
}

// Tenth-order NARMA recurrence over a sliding history window, newest first.
inline std::vector<double> narma10(const std::vector<double>& u) {
    std::vector<double> out;
    out.reserve(u.size());
    std::deque<double> hist;
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (n < 10) {
            out.push_back(0.0);
            hist.push_front(0.0);
            continue;
        }
        const double zn = hist.front();
        const double window = std::accumulate(hist.begin(), hist.end(), 0.0);
        const double next = 0.3 * zn + 0.05 * zn * window + 1.5 * u[n - 10] * u[n - 1] + 0.1;
        out.push_back(next);
        hist.push_front(next);
        hist.pop_back();
    }
    return out;
}

// Closed-form Legendre polynomials up to degree 6.
inline double legendre_closed(int d, double x) {
    const double x2 = x * x;
    switch (d) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return (3 * x2 - 1) / 2;
    case 3: return (5 * x2 * x - 3 * x) / 2;
    case 4: return (35 * x2 * x2 - 30 * x2 + 3) / 8;
    case 5: return (63 * x2 * x2 * x - 70 * x2 * x + 15 * x) / 8;
    case 6: return (231 * x2 * x2 * x2 - 315 * x2 * x2 + 105 * x2 - 5) / 16;
    default: throw std::invalid_argument("oracle: degree above 6");
    }
}

// Squared sample correlation, two-pass.
inline double squared_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab * sab / (saa * sbb);
}

} // namespace oracle
