// Parameter sweep over reservoir generation and neuron physics.
//
//   lifrc_calibrate key=value ...
//
// Keys: n density input_density exc_frac input_exc_frac random_input_polarity
// weight (fixed, -1 = uniform) eta tau microstep noise fan_in
// seed input_seed tasks=mc,narma,force,nlmc mc_ts narma_ts force_freq
// Each comma-separated value list is swept as a cartesian product.

#include "lifrc/benchmarks.hpp"
#include "lifrc/config.hpp"
#include "lifrc/force.hpp"

#include <chrono>
#include <random>
#include <fstream>
#include <iomanip>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace lifrc;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    return out;
}

void run_point(const std::map<std::string, std::string>& kv) {
    auto num = [&](const char* key, double def) {
        auto it = kv.find(key);
        return it == kv.end() ? def : std::stod(it->second);
    };
    auto str = [&](const char* key, const char* def) {
        auto it = kv.find(key);
        return it == kv.end() ? std::string(def) : it->second;
    };

    ReservoirSpec spec;
    spec.n_neurons = static_cast<std::size_t>(num("n", spec.n_neurons));
    spec.connection_density = num("density", spec.connection_density);
    spec.input_density = num("input_density", spec.input_density);
    spec.excitation_fraction = num("exc_frac", spec.excitation_fraction);
    spec.input_excitation_fraction = num("input_exc_frac", spec.input_excitation_fraction);
    spec.random_input_polarity = num("random_input_polarity", spec.random_input_polarity) != 0;
    spec.fan_in_limit = static_cast<std::size_t>(num("fan_in", spec.fan_in_limit));
    spec.seed = static_cast<std::uint64_t>(num("seed", spec.seed));
    if (kv.count("weight")) {
        const int w = static_cast<int>(num("weight", -1));
        spec.fixed_weight = w >= 0 ? std::optional<int>(w) : std::nullopt;
    }

    ReservoirConfig phys = default_physical_config();
    phys.neuron_params.eta = num("eta", phys.neuron_params.eta);
    phys.neuron_params.tau_leak = num("tau", phys.neuron_params.tau_leak);
    phys.microstep = num("microstep", phys.microstep);
    phys.noise_sigma = num("noise", phys.noise_sigma);
    phys.readout.f_base = num("f_base", phys.readout.f_base);
    phys.readout.saturation = static_cast<std::uint32_t>(num("sat", phys.readout.saturation));
    phys.neuron_params.v_rest = num("v_rest", phys.neuron_params.v_rest);
    auto config = random_reservoir(spec, phys);
    if (const int self = static_cast<int>(num("self", 0)); self != 0) {
        // Experimental: a self loop on every neuron, polarity and weight drawn.
        config.allow_self_connections = true;
        std::mt19937_64 rng(spec.seed + 99);
        const double exc = num("self_exc", 0.5);
        const int wmax = static_cast<int>(num("self_wmax", 15));
        for (std::size_t i = 0; i < config.neurons(); ++i) {
            const int w = std::uniform_int_distribution<int>(0, wmax)(rng);
            const bool e = std::uniform_real_distribution<double>(0, 1)(rng) < exc;
            config.matrix.set(i, i, e ? ConnectionEntry::excite(w) : ConnectionEntry::inhibit(w));
        }
    }

    std::ostringstream line;
    for (const auto& [k, v] : kv)
        if (k != "tasks")
            line << k << '=' << v << ' ';
    line << "links=" << config.matrix.connection_count();

    const auto tasks = str("tasks", "mc,narma");
    for (const auto& task : split_list(tasks)) {
        const auto t0 = std::chrono::steady_clock::now();
        if (task == "mc") {
            McOptions opt;
            opt.ts = num("mc_ts", 120e-6);
            opt.ridge = Ridge::relative(num("ridge", 1e-8));
            opt.trace_delays.clear();
            const auto r = mc_benchmark(
                config, {static_cast<std::size_t>(num("mc_T", 200)), TruncatedNormal{0, 0.5, -1, 1},
                         static_cast<std::uint64_t>(num("input_seed", 11))},
                opt);
            line << " | MC=" << r.total_mc << " [";
            for (std::size_t k = 0; k < 10 && k < r.mc_k.size(); ++k)
                line << (k ? " " : "") << static_cast<int>(r.mc_k[k].value * 100);
            double tail = 0;
            for (std::size_t k = 7; k < r.mc_k.size(); ++k)
                tail = std::max(tail, r.mc_k[k].value);
            line << "] tailmax=" << tail;
        } else if (task == "narma") {
            NarmaOptions opt;
            opt.ts = num("narma_ts", 120e-6);
            const auto r = narma10_benchmark(
                config, {1000, TruncatedNormal{0.5, 0.25, 0, 1},
                         static_cast<std::uint64_t>(num("input_seed", 11))},
                opt);
            line << " | NRMSE=" << r.test.nrmse.value_or(-1) << " RMSE=" << r.test.rmse
                 << " trainNRMSE=" << r.train.nrmse.value_or(-1);
        } else if (task == "force") {
            ForceOptions opt;
            opt.freq_hz = num("force_freq", 220);
            opt.alpha = num("alpha", 1.0);
            const auto r = force_run(config, opt);
            line << " | corr=" << r.correlation.value_or(-2) << " clamped=" << r.clamped;
        } else if (task == "diag") {
            const auto u = gen_input({static_cast<std::size_t>(num("mc_T", 1000)), TruncatedNormal{0, 0.5, -1, 1},
                                      static_cast<std::uint64_t>(num("input_seed", 11))});
            const auto rec = record(config, u, num("mc_ts", 120e-6));
            if (kv.count("dump")) {
                std::ofstream f(kv.at("dump"));
                f << std::setprecision(10);
                write_recording_csv(f, rec);
            }
            const auto x = rec.states.bottomRows(rec.states.rows() - 50);
            const Eigen::RowVectorXd mean = x.colwise().mean();
            const Eigen::RowVectorXd sd =
                ((x.rowwise() - mean).array().square().colwise().mean()).sqrt();
            int rail = 0, flat = 0;
            for (Eigen::Index i = 0; i < x.cols(); ++i) {
                if (mean[i] < 0.03 || mean[i] > 0.97) ++rail;
                if (sd[i] < 0.01) ++flat;
            }
            auto other = config;
            other.seed += 1000;
            const auto rec2 = record(other, u, num("mc_ts", 120e-6));
            const auto x2 = rec2.states.bottomRows(rec2.states.rows() - 50);
            const double diff = (x - x2).array().square().mean() / 2;
            const double var = (x.rowwise() - mean).array().square().mean();
            line << " consistency=" << 1 - diff / var;
            std::vector<double> s(sd.data(), sd.data() + sd.size());
            std::sort(s.begin(), s.end());
            line << " | rail=" << rail << " flat=" << flat << " sd[q10,q50,q90]=" << s[s.size() / 10] << ','
                 << s[s.size() / 2] << ',' << s[s.size() * 9 / 10];
        } else if (task == "nlmc") {
            NlmcOptions opt;
            opt.d_max = static_cast<int>(num("d_max", 9));
            opt.family_limit = static_cast<std::size_t>(num("family", 2000));
            const auto r = nlmc_benchmark(
                config, {3000, TruncatedNormal{0, 0.5, -1, 1},
                         static_cast<std::uint64_t>(num("input_seed", 11))},
                opt);
            line << " | lin=" << r.linear_peak << " nlmc=[";
            for (const auto& d : r.per_degree)
                line << ' ' << std::setprecision(3) << d.max_capacity << d.argmax.to_string();
            line << " ]";
        }
        const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        line << " (" << dt << "s)";
    }
    std::cout << line.str() << std::endl;
}

void sweep(std::vector<std::pair<std::string, std::vector<std::string>>>& axes, std::size_t i,
           std::map<std::string, std::string>& point) {
    if (i == axes.size()) {
        run_point(point);
        return;
    }
    const auto& [key, values] = axes[i];
    if (key == "tasks") {
        point[key] = [&] {
            std::string s;
            for (const auto& v : values)
                s += (s.empty() ? "" : ",") + v;
            return s;
        }();
        sweep(axes, i + 1, point);
        return;
    }
    for (const auto& v : values) {
        point[key] = v;
        sweep(axes, i + 1, point);
    }
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        const auto eq = arg.find('=');
        if (eq == std::string::npos) {
            std::cerr << "expected key=value, got " << arg << '\n';
            return 2;
        }
        axes.emplace_back(arg.substr(0, eq), split_list(arg.substr(eq + 1)));
    }
    std::map<std::string, std::string> point;
    sweep(axes, 0, point);
    return 0;
}
