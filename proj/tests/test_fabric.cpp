#include "lifrc/config.hpp"
#include "lifrc/fabric.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace lifrc;

namespace {

ReservoirConfig isolated(std::size_t n) {
    auto c = default_physical_config();
    c.matrix = ConnectivityMatrix(n);
    return c;
}

} // namespace

TEST_SUITE("fabric") {

TEST_CASE("weight to pulse width") {
    CHECK(weight_to_width(0, 25e-9) == doctest::Approx(25e-9));
    CHECK(weight_to_width(7, 25e-9) == doctest::Approx(200e-9));
    CHECK(weight_to_width(15, 25e-9) == doctest::Approx(400e-9));
    for (int w = 0; w < 15; ++w)
        CHECK(weight_to_width(w + 1, 25e-9) > weight_to_width(w, 25e-9));
    CHECK_THROWS_AS(weight_to_width(16, 25e-9), std::invalid_argument);
    CHECK_THROWS_AS(weight_to_width(-1, 25e-9), std::invalid_argument);
}

TEST_CASE("input channel split") {
    auto [e1, i1] = input_frequencies(0.5, 1e6);
    CHECK(e1 == doctest::Approx(500e3));
    CHECK(i1 == 0.0);
    auto [e2, i2] = input_frequencies(0.0, 1e6);
    CHECK(e2 == 0.0);
    CHECK(i2 == 0.0);
    auto [e3, i3] = input_frequencies(-1.0, 1e6);
    CHECK(e3 == 0.0);
    CHECK(i3 == doctest::Approx(1e6));
    CHECK_THROWS_AS(input_frequencies(1.01, 1e6), std::invalid_argument);
    CHECK_THROWS_AS(input_frequencies(std::nan(""), 1e6), std::invalid_argument);
}

TEST_CASE("connection entries are range checked") {
    CHECK(ConnectionEntry::excite(15).weight == 15);
    CHECK(ConnectionEntry::inhibit(0).polarity() == Polarity::inhibition);
    CHECK_THROWS_AS(ConnectionEntry::excite(16), std::invalid_argument);
    CHECK_FALSE(ConnectionEntry{}.connected());

    ConnectivityMatrix m(3);
    CHECK(m.sources() == 5);
    CHECK(m.exc_input() == 3);
    CHECK(m.inh_input() == 4);
    CHECK_THROWS_AS(m.set(3, 0, ConnectionEntry::excite(1)), std::out_of_range);
    CHECK_THROWS_AS(m.at(0, 5), std::out_of_range);
}

TEST_CASE("isolated neuron follows the pure leak trajectory") {
    auto c = isolated(1);
    const Fabric fabric(c);
    auto s = fabric.initial_state();
    s.neurons[0].v_cap = 0.7;
    for (int k = 1; k <= 500; ++k) {
        fabric.advance_microstep(s, 0.0);
        const double expect = 0.5 + 0.2 * std::exp(-k * c.microstep / c.neuron_params.tau_leak);
        REQUIRE(s.neurons[0].v_cap == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(s.microsteps == 500);
    CHECK(s.sim_time == doctest::Approx(500 * c.microstep));
}

TEST_CASE("phase accumulator at 250 kHz with a 1 us step emits every fourth step") {
    auto c = isolated(1);
    c.input_max_freq = 250e3;
    c.microstep = 1e-6;
    const Fabric fabric(c);
    auto s = fabric.initial_state();
    std::vector<int> edge_steps;
    for (int k = 0; k < 400; ++k) {
        fabric.advance_microstep(s, 1.0);
        if (fabric.last_edges()[c.matrix.exc_input()] > 0)
            edge_steps.push_back(k);
        CHECK(fabric.last_edges()[c.matrix.inh_input()] == 0);
    }
    REQUIRE(edge_steps.size() == 100);
    for (std::size_t i = 1; i < edge_steps.size(); ++i)
        CHECK(edge_steps[i] - edge_steps[i - 1] == 4);
}

TEST_CASE("a neuron at the rail drives its target up to the clamp") {
    auto c = isolated(2);
    c.neuron_params.eta = 5e4;
    c.matrix.set(1, 0, ConnectionEntry::excite(15));
    const Fabric fabric(c);
    auto s = fabric.initial_state();
    s.neurons[0].v_cap = 1.0;
    double last = s.neurons[1].v_cap;
    int pulses = 0;
    for (int k = 0; k < 400; ++k) {
        fabric.advance_microstep(s, 0.0);
        if (fabric.last_edges()[0] > 0) {
            ++pulses;
            CHECK(s.neurons[1].v_cap >= last);
            last = s.neurons[1].v_cap;
        }
    }
    CHECK(pulses >= 70);
    CHECK(last > 0.999);
}

TEST_CASE("inhibitory link pulls the target down") {
    auto c = isolated(2);
    c.matrix.set(1, c.matrix.inh_input(), ConnectionEntry::inhibit(15));
    const Fabric fabric(c);
    auto s = fabric.initial_state();
    fabric.run_until_sample(s, -1.0, 50e-6);
    // 50 edges of 2 mV each; leak toward rest claws back about 1 mV.
    CHECK(s.neurons[1].v_cap == doctest::Approx(0.4).epsilon(0.005));
    CHECK(s.neurons[1].v_cap > 0.4);
    CHECK(s.neurons[0].v_cap == 0.5);
}

TEST_CASE("sample window bookkeeping") {
    auto c = isolated(4);
    const Fabric fabric(c);
    CHECK(fabric.steps_per_sample(50e-6) == 250);
    CHECK(fabric.steps_per_sample(120e-6) == 600);
    CHECK_THROWS_AS(fabric.steps_per_sample(50.1e-6), std::invalid_argument);
    CHECK_THROWS_AS(fabric.steps_per_sample(0.0), std::invalid_argument);

    auto s = fabric.initial_state();
    fabric.run_until_sample(s, 0.0, 50e-6);
    CHECK(s.microsteps == 250);
    for (const auto& n : s.neurons)
        CHECK(n.v_cap == 0.5);
}

TEST_CASE("invalid configs are rejected at construction") {
    auto c = isolated(2);
    c.microstep = 1e-6;
    CHECK_THROWS_AS(Fabric{c}, std::invalid_argument);
    c = isolated(2);
    c.matrix.raw(0, 0) = ConnectionEntry::excite(3);
    CHECK_THROWS_AS(Fabric{c}, std::invalid_argument);
    c.allow_self_connections = true;
    CHECK_NOTHROW(Fabric{c});
}

TEST_CASE("property: identical config, seed and inputs give identical trajectories") {
    const auto c = random_reservoir({});
    const Fabric fabric(c);
    auto a = fabric.initial_state();
    auto b = fabric.initial_state();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 20; ++n) {
        const double x = u(rng);
        fabric.run_until_sample(a, x, 50e-6);
        fabric.run_until_sample(b, x, 50e-6);
        REQUIRE(a == b);
    }
}

TEST_CASE("noise is seeded and stays within the rails") {
    auto c = random_reservoir({});
    c.noise_sigma = 0.2;
    const Fabric fabric(c);
    auto a = fabric.initial_state();
    auto b = fabric.initial_state();
    for (int n = 0; n < 10; ++n) {
        fabric.run_until_sample(a, 0.3, 50e-6);
        fabric.run_until_sample(b, 0.3, 50e-6);
    }
    CHECK(a == b);
    for (const auto& n : a.neurons) {
        CHECK(n.v_cap >= 0.0);
        CHECK(n.v_cap <= 1.0);
    }

    auto quiet = c;
    quiet.noise_sigma = 0.0;
    const Fabric plain(quiet);
    auto q = plain.initial_state();
    for (int n = 0; n < 10; ++n)
        plain.run_until_sample(q, 0.3, 50e-6);
    CHECK_FALSE(q.neurons == a.neurons);
}

TEST_CASE("property: edge count matches frequency times window within one") {
    auto c = isolated(3);
    const Fabric fabric(c);
    const double f_rest = vco_frequency(c.neuron_params.vco_pos, c.neuron_params.v_rest);
    for (double u : {0.0, 0.13, 0.5, -0.77, 1.0}) {
        auto s = fabric.initial_state();
        std::vector<std::uint64_t> counts(c.matrix.sources(), 0);
        const int steps = 1237;
        for (int k = 0; k < steps; ++k) {
            fabric.advance_microstep(s, u);
            for (std::size_t src = 0; src < counts.size(); ++src)
                counts[src] += fabric.last_edges()[src];
        }
        const double window = steps * c.microstep;
        const auto [fe, fi] = input_frequencies(u, c.input_max_freq);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(static_cast<double>(counts[i]) - f_rest * window) <= 1.0);
        CHECK(std::abs(static_cast<double>(counts[3]) - fe * window) <= 1.0);
        CHECK(std::abs(static_cast<double>(counts[4]) - fi * window) <= 1.0);
    }
}

TEST_CASE("property: isolated neurons settle within 1 mV after ten time constants") {
    auto c = isolated(8);
    const Fabric fabric(c);
    auto s = fabric.initial_state();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    for (auto& n : s.neurons)
        n.v_cap = v(rng);
    const auto steps = static_cast<int>(std::lround(10 * c.neuron_params.tau_leak / c.microstep));
    for (int k = 0; k < steps; ++k)
        fabric.advance_microstep(s, 0.0);
    for (const auto& n : s.neurons)
        CHECK(std::abs(n.v_cap - c.neuron_params.v_rest) < 1e-3);
}

TEST_CASE("property: halving the microstep moves sampled voltages by less than 2 mV") {
    const auto coarse_cfg = random_reservoir({});
    auto fine_cfg = coarse_cfg;
    fine_cfg.microstep = coarse_cfg.microstep / 2;
    const Fabric coarse(coarse_cfg), fine(fine_cfg);
    auto a = coarse.initial_state();
    auto b = fine.initial_state();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> u(0.0, 0.5);
    double worst = 0.0;
    for (int n = 0; n < 60; ++n) {
        const double x = std::clamp(u(rng), -1.0, 1.0);
        coarse.run_until_sample(a, x, 120e-6);
        fine.run_until_sample(b, x, 120e-6);
        for (std::size_t i = 0; i < a.neurons.size(); ++i)
            worst = std::max(worst, std::abs(a.neurons[i].v_cap - b.neurons[i].v_cap));
    }
    MESSAGE("largest deviation " << worst * 1e3 << " mV");
    CHECK(worst < 2e-3);
}

}
