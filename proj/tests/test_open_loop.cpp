#include "lifrc/config.hpp"
#include "lifrc/open_loop.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace lifrc;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = d(rng);
    return m;
}

} // namespace

TEST_SUITE("open_loop") {

TEST_CASE("split boundaries") {
    auto s = split(200);
    CHECK(s.ignored.begin == 0);
    CHECK(s.ignored.end == 20);
    CHECK(s.train.begin == 20);
    CHECK(s.train.end == 160);
    CHECK(s.test.begin == 160);
    CHECK(s.test.end == 200);

    auto k = split(1000);
    CHECK(k.ignored.size() == 100);
    CHECK(k.train.size() == 700);
    CHECK(k.test.size() == 200);

    auto t = split(10);
    CHECK(t.ignored.size() == 1);
    CHECK(t.train.size() == 7);
    CHECK(t.test.size() == 2);

    CHECK_THROWS_AS(split(9), std::invalid_argument);
    CHECK_THROWS_AS(split(100, {0.5, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(split(100, {-0.1, 0.6, 0.5}), std::invalid_argument);
}

TEST_CASE("property: split ranges are contiguous and cover every row") {
    for (std::size_t t = 10; t < 3000; t += 37) {
        const auto s = split(t);
        CHECK(s.ignored.end == s.train.begin);
        CHECK(s.train.end == s.test.begin);
        CHECK(s.test.end == t);
        CHECK(s.train.size() == static_cast<std::size_t>(std::floor(t * 0.8 + 1e-9)) - s.ignored.size());
    }
}

TEST_CASE("least squares by hand") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 2;
    Eigen::VectorXd z(2);
    z << 2, 4;
    CHECK(lsm_fit(x, z, Ridge::none())[0] == doctest::Approx(2.0));
}

TEST_CASE("exact fit recovers the generating weights") {
    std::mt19937_64 rng(31);
    const Eigen::MatrixXd x = gaussian(40, 8, rng);
    const Eigen::VectorXd w0 = gaussian(8, 1, rng);
    const Eigen::VectorXd w = lsm_fit(x, x * w0, Ridge::none());
    CHECK((w - w0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank deficient design without ridge is reported") {
    std::mt19937_64 rng(32);
    Eigen::MatrixXd x = gaussian(30, 4, rng);
    x.col(3) = x.col(1);
    const Eigen::VectorXd z = gaussian(30, 1, rng);
    CHECK_THROWS_AS(lsm_fit(x, z, Ridge::none()), IllConditioned);
    try {
        lsm_fit(x, z, Ridge::none());
    } catch (const IllConditioned& e) {
        CHECK(e.smallest_singular_value() < 1e-6);
        CHECK(std::string(e.what()).find("smallest singular value") != std::string::npos);
    }
    CHECK_NOTHROW(lsm_fit(x, z));
    CHECK_THROWS_AS(lsm_fit(gaussian(3, 5, rng), gaussian(3, 1, rng), Ridge::none()), IllConditioned);
    CHECK_THROWS_AS(lsm_fit(x, gaussian(29, 1, rng)), std::invalid_argument);
}

TEST_CASE("ridge modes") {
    std::mt19937_64 rng(33);
    const Eigen::MatrixXd x = gaussian(50, 5, rng);
    const Eigen::MatrixXd gram = x.transpose() * x;
    CHECK(LeastSquares(x, Ridge::none()).lambda() == 0.0);
    CHECK(LeastSquares(x).lambda() == doctest::Approx(1e-8 * gram.trace() / 5));
    CHECK(LeastSquares(x, Ridge::absolute(0.25)).lambda() == 0.25);

    const Eigen::VectorXd z = gaussian(50, 1, rng);
    const Eigen::VectorXd w = lsm_fit(x, z, Ridge::absolute(3.0));
    const Eigen::VectorXd ref = (gram + 3.0 * Eigen::MatrixXd::Identity(5, 5)).ldlt().solve(x.transpose() * z);
    CHECK((w - ref).norm() < 1e-12 * ref.norm());
}

TEST_CASE("property: batch fit equals the pseudo-inverse oracle") {
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> cols(1, 20);
    for (int trial = 0; trial < 200; ++trial) {
        const int c = cols(rng);
        std::uniform_int_distribution<int> rows(c, 50);
        const int r = rows(rng);
        const Eigen::MatrixXd x = gaussian(r, c, rng);
        const Eigen::VectorXd z = gaussian(r, 1, rng);
        Eigen::VectorXd w;
        try {
            w = lsm_fit(x, z, Ridge::none());
        } catch (const IllConditioned&) {
            continue;
        }
        const auto ref = oracle::pinv_solve(x, z);
        REQUIRE((w - ref).norm() <= 1e-8 * ref.norm());
    }
}

TEST_CASE("property: fitted weights beat any perturbation on the training rows") {
    std::mt19937_64 rng(35);
    const Eigen::MatrixXd x = gaussian(60, 10, rng);
    const Eigen::VectorXd z = gaussian(60, 1, rng);
    const Eigen::VectorXd w = lsm_fit(x, z, Ridge::none());
    const double best = (x * w - z).squaredNorm();
    std::normal_distribution<double> d(0.0, 1e-3);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd delta(10);
        for (auto& v : delta)
            v = d(rng);
        CHECK((x * (w + delta) - z).squaredNorm() >= best);
    }
}

TEST_CASE("prediction is linear in the weights") {
    Eigen::MatrixXd one(1, 2);
    one << 1, 2;
    Eigen::VectorXd w(2);
    w << 3, 4;
    CHECK(predict_series(one, w)[0] == 11.0);
    CHECK(predict_series(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(7, 8, 9)) == Eigen::Vector3d(7, 8, 9));
    CHECK(predict_series(one, Eigen::VectorXd::Zero(2))[0] == 0.0);
    CHECK_THROWS_AS(predict_series(one, Eigen::VectorXd::Zero(3)), std::invalid_argument);

    std::mt19937_64 rng(36);
    for (int i = 0; i < 50; ++i) {
        const Eigen::MatrixXd x = gaussian(30, 6, rng);
        const Eigen::VectorXd w1 = gaussian(6, 1, rng), w2 = gaussian(6, 1, rng);
        const double a = std::normal_distribution<double>()(rng), b = std::normal_distribution<double>()(rng);
        const Eigen::VectorXd lhs = predict_series(x, a * w1 + b * w2);
        const Eigen::VectorXd rhs = a * predict_series(x, w1) + b * predict_series(x, w2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("recording") {
    const auto cfg = random_reservoir({});
    std::vector<double> none;
    CHECK(record(cfg, none, 120e-6).samples() == 0);

    std::vector<double> bad{0.1, 1.5};
    CHECK_THROWS_AS(record(cfg, bad, 120e-6), std::invalid_argument);

    auto quiet = default_physical_config();
    quiet.matrix = ConnectivityMatrix(5);
    std::vector<double> zeros(12, 0.0);
    const auto rest = record(quiet, zeros, 120e-6);
    CHECK(rest.states.rows() == 12);
    CHECK(rest.states.cols() == 5);
    CHECK((rest.states.array() - 0.5).abs().maxCoeff() < 2e-3);

    std::vector<double> u{0.3, -0.2, 0.9, -0.7, 0.0, 0.5};
    const auto a = record(cfg, u, 120e-6);
    const auto b = record(cfg, u, 120e-6);
    CHECK(a.states == b.states);
    CHECK(a.inputs == u);
    CHECK(a.ts == 120e-6);

    std::ostringstream csv;
    write_recording_csv(csv, rest);
    const std::string text = csv.str();
    CHECK(text.substr(0, text.find('\n')) == "n,u,x0,x1,x2,x3,x4");
}

TEST_CASE("readout only sees its training rows") {
    std::mt19937_64 rng(37);
    Recording rec;
    rec.states = gaussian(100, 4, rng);
    rec.inputs.assign(100, 0.0);
    const auto s = split(100);
    const Readout r(rec, s.train, Ridge::none());

    const Eigen::Vector4d w0(1, -2, 0.5, 3);
    std::vector<double> z(100);
    for (int n = 0; n < 100; ++n)
        z[static_cast<std::size_t>(n)] = rec.states.row(n).dot(w0);
    for (std::size_t n = 0; n < 100; ++n)
        if (!s.train.contains(n))
            z[n] = 1e6;
    const Eigen::VectorXd w = r.fit(z);
    CHECK((w - Eigen::VectorXd(w0)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.predict(w, s.test).size() == 20);
    CHECK(r.predict_all(w).size() == 100);
    CHECK_THROWS_AS(r.fit(std::vector<double>(99)), std::invalid_argument);
}

}
