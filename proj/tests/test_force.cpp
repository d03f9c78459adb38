#include "lifrc/config.hpp"
#include "lifrc/force.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace lifrc;

TEST_SUITE("force") {

TEST_CASE("teaching precedes testing and weights freeze") {
    const auto cfg = random_reservoir({});
    ForceOptions opt;
    opt.teach_cycles = 3;
    opt.test_cycles = 2;
    const auto r = force_run(cfg, opt);
    // 220 Hz at 50 us: 1/(220 * 50e-6) = 90.9 samples per cycle.
    CHECK(r.teach_samples == 273);
    CHECK(r.test_samples == 182);
    REQUIRE(r.trace.size() == 455);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const auto& s = r.trace[i];
        CHECK(s.n == i + 1);
        CHECK(s.phase == (i < 273 ? ForcePhase::teach : ForcePhase::test));
        CHECK(s.epsilon.has_value() == (s.phase == ForcePhase::teach));
        CHECK(s.probes.size() == 4);
        CHECK(s.z == doctest::Approx(std::sin(2 * std::numbers::pi * 220.0 * static_cast<double>(s.n) * 50e-6)));
    }
    CHECK(r.weights_after_teach == r.weights_after_test);
    CHECK(r.weights_after_teach.size() == 100);
    CHECK(r.correlation.has_value());
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("zero teaching signal is flagged as degenerate") {
    const auto cfg = random_reservoir({});
    ForceOptions opt;
    opt.amplitude = 0.0;
    opt.teach_cycles = 2;
    opt.test_cycles = 1;
    const auto r = force_run(cfg, opt);
    CHECK(r.degenerate);
    CHECK_FALSE(r.correlation.has_value());
    CHECK(std::abs(r.trace.back().z_p) < std::abs(r.trace.front().z_p) + 1e-9);
}

TEST_CASE("argument checks") {
    const auto cfg = random_reservoir({});
    ForceOptions opt;
    opt.freq_hz = 3000.0;
    CHECK_THROWS_AS(force_run(cfg, opt), std::invalid_argument);
    opt = {};
    opt.probes = {100};
    CHECK_THROWS_AS(force_run(cfg, opt), std::invalid_argument);
    opt = {};
    opt.alpha = 0.0;
    CHECK_THROWS_AS(force_run(cfg, opt), std::invalid_argument);
}

TEST_CASE("fixed-point mode runs the same loop") {
    const auto cfg = random_reservoir({});
    ForceOptions opt;
    opt.teach_cycles = 2;
    opt.test_cycles = 1;
    const auto f = force_run(cfg, opt);
    opt.arithmetic = Arithmetic::fixed_point;
    const auto q = force_run(cfg, opt);
    REQUIRE(q.trace.size() == f.trace.size());
    // Feedback amplifies rounding differences over time, so the modes are
    // compared tightly only before the loop has had time to diverge.
    double early = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
        early = std::max(early, std::abs(q.trace[i].z_p - f.trace[i].z_p));
    CHECK(early < 1e-5);
    REQUIRE(f.correlation.has_value());
    REQUIRE(q.correlation.has_value());
    CHECK(*q.correlation > 0.5);
    CHECK(std::abs(*q.correlation - *f.correlation) < 0.05);
}

TEST_CASE("trace CSV") {
    const auto cfg = random_reservoir({});
    ForceOptions opt;
    opt.teach_cycles = 0.1;
    opt.test_cycles = 0.1;
    opt.probes = {7};
    const auto r = force_run(cfg, opt);
    std::ostringstream out;
    write_force_csv(out, r, opt.probes);
    std::istringstream in(out.str());
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "n,z,z_p,epsilon,phase,x7");
    CHECK(first.find(",teach,") != std::string::npos);
    std::string line, last;
    while (std::getline(in, line))
        last = line;
    CHECK(last.find(",,test,") != std::string::npos);
}

}
