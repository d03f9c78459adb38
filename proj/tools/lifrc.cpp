// lifrc: generate reservoir configurations and run benchmarks on them.
//
// Exit codes: 0 success, 2 usage, 3 config or parse failure, 4 runtime
// failure, 5 file-system failure.

#include "lifrc/benchmarks.hpp"
#include "lifrc/config.hpp"
#include "lifrc/force.hpp"
#include "lifrc/open_loop.hpp"
#include "lifrc/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef LIFRC_VERSION
#define LIFRC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lifrc;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kConfig = 3, kRuntime = 4, kIo = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw IoError("write failed: " + path.string());
}

template <class Fn>
void write_stream(const fs::path& path, Fn&& fn) {
    std::ostringstream os;
    os << std::setprecision(12);
    fn(os);
    write_file(path, os.str());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string default_out_dir() {
    if (const char* env = std::getenv("LIFRC_OUT_DIR"); env && *env)
        return env;
    return "lifrc-out";
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
    std::string task;
    std::string config;
    std::string ts;
    std::size_t samples = 0;
    double teach_cycles = 15;
    double test_cycles = 5;
    double alpha = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t reservoir_seed = 1;
    bool drawn_reservoir = false; // config copy of a reservoir drawn from reservoir_seed
    std::string freq = "220Hz";
    std::size_t k_max = 30;
    int d_max = 15;
    std::size_t family_limit = 2000;
    std::string arithmetic = "float";
    std::string out_dir;
    std::string sweep;
};

std::size_t default_samples(const std::string& task) {
    if (task == "mc")
        return 200;
    if (task == "nlmc")
        return 3000;
    if (task == "narma10")
        return 1000;
    return 0;
}

// Fills task defaults so the manifest holds every value actually used.
void resolve(RunArgs& a) {
    if (a.ts.empty())
        a.ts = a.task == "force" ? "50us" : "120us";
    if (a.samples == 0)
        a.samples = default_samples(a.task);
    if (a.arithmetic != "float" && a.arithmetic != "fixed")
        throw UsageError("--arithmetic must be 'float' or 'fixed'");
    try {
        parse_duration(a.ts);
        parse_frequency(a.freq);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

json parameters_json(const RunArgs& a) {
    json p{{"task", a.task}, {"ts", a.ts}, {"ts_seconds", parse_duration(a.ts)}, {"seed", a.seed}};
    if (a.config.empty() || a.drawn_reservoir)
        p["reservoir_seed"] = a.reservoir_seed;
    if (a.task == "force") {
        p["freq"] = a.freq;
        p["freq_hz"] = parse_frequency(a.freq);
        p["teach_cycles"] = a.teach_cycles;
        p["test_cycles"] = a.test_cycles;
        p["alpha"] = a.alpha;
        p["arithmetic"] = a.arithmetic;
    } else {
        p["samples"] = a.samples;
    }
    if (a.task == "mc")
        p["k_max"] = a.k_max;
    if (a.task == "nlmc") {
        p["d_max"] = a.d_max;
        p["family_limit"] = a.family_limit;
    }
    return p;
}

RunArgs args_from_parameters(const json& p) {
    RunArgs a;
    a.task = p.at("task").get<std::string>();
    a.ts = p.at("ts").get<std::string>();
    a.seed = p.at("seed").get<std::uint64_t>();
    a.drawn_reservoir = p.contains("reservoir_seed");
    a.reservoir_seed = p.value("reservoir_seed", std::uint64_t{1});
    a.samples = p.value("samples", std::size_t{0});
    a.freq = p.value("freq", std::string("220Hz"));
    a.teach_cycles = p.value("teach_cycles", 15.0);
    a.test_cycles = p.value("test_cycles", 5.0);
    a.alpha = p.value("alpha", 1.0);
    a.arithmetic = p.value("arithmetic", std::string("float"));
    a.k_max = p.value("k_max", std::size_t{30});
    a.d_max = p.value("d_max", 15);
    a.family_limit = p.value("family_limit", std::size_t{2000});
    return a;
}

ReservoirConfig obtain_config(const RunArgs& a) {
    ReservoirConfig config;
    if (a.config.empty()) {
        ReservoirSpec spec;
        spec.seed = a.reservoir_seed;
        config = random_reservoir(spec);
    } else {
        if (!fs::exists(a.config))
            throw IoError("config not found: " + a.config);
        try {
            config = load_config(a.config);
        } catch (const BitstreamError& e) {
            throw ConfigError(a.config + ": " + e.what());
        } catch (const json::exception& e) {
            throw ConfigError(a.config + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(a.config + ": " + e.what());
        }
    }
    const auto violations = validate(config);
    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations)
            msg += "\n  " + v.message;
        throw ConfigError(msg);
    }
    return config;
}

void write_trace(const fs::path& path, const std::vector<TracePoint>& trace) {
    write_stream(path, [&](std::ostream& os) {
        os << "n,u,z,z_p,split\n";
        for (const auto& p : trace)
            os << p.n << ',' << p.u << ',' << p.z << ',' << p.z_p << ',' << p.split << '\n';
    });
}

json run_mc(const RunArgs& a, const ReservoirConfig& config, const fs::path& dir) {
    const auto u = gen_input({a.samples, TruncatedNormal{0.0, 0.5, -1.0, 1.0}, a.seed});
    const auto rec = record(config, u, parse_duration(a.ts));
    McOptions opt;
    opt.ts = rec.ts;
    opt.k_max = a.k_max;
    const auto r = mc_evaluate(rec, opt);

    write_stream(dir / "recording.csv", [&](std::ostream& os) { write_recording_csv(os, rec); });
    write_stream(dir / "mc_k.csv", [&](std::ostream& os) {
        os << "k,mc_k\n";
        for (std::size_t k = 0; k < r.mc_k.size(); ++k)
            os << k + 1 << ',' << r.mc_k[k].value << '\n';
    });
    for (std::size_t t = 0; t < r.trace_delays.size(); ++t)
        if (!r.traces[t].empty())
            write_trace(dir / ("trace_k" + std::to_string(r.trace_delays[t]) + ".csv"), r.traces[t]);
    json weights = json::object();
    for (std::size_t k = 0; k < r.weights.size(); ++k)
        weights[std::to_string(k + 1)] = vec_json(r.weights[k]);
    write_json(dir / "weights.json", weights);

    json mc = json::array(), degenerate = json::array();
    for (std::size_t k = 0; k < r.mc_k.size(); ++k) {
        mc.push_back(r.mc_k[k].value);
        if (r.mc_k[k].degenerate)
            degenerate.push_back(k + 1);
    }
    return {{"total_mc", r.total_mc}, {"mc_k", mc}, {"degenerate_k", degenerate}};
}

json run_nlmc(const RunArgs& a, const ReservoirConfig& config, const fs::path& dir) {
    const auto u = gen_input({a.samples, TruncatedNormal{0.0, 0.5, -1.0, 1.0}, a.seed});
    const auto rec = record(config, u, parse_duration(a.ts));
    NlmcOptions opt;
    opt.ts = rec.ts;
    opt.d_max = a.d_max;
    opt.family_limit = a.family_limit;
    const auto r = nlmc_evaluate(rec, opt);

    write_stream(dir / "nlmc_d.csv", [&](std::ostream& os) {
        os << "d,max_capacity\n";
        for (const auto& d : r.per_degree)
            os << d.degree << ',' << d.max_capacity << '\n';
    });
    json degrees = json::array();
    for (const auto& d : r.per_degree)
        degrees.push_back({{"degree", d.degree},
                           {"max_capacity", d.max_capacity},
                           {"argmax", d.argmax.to_string()},
                           {"evaluated", d.evaluated},
                           {"overflow", d.overflow}});
    return {{"linear_peak", r.linear_peak}, {"degrees", degrees}};
}

json run_narma(const RunArgs& a, const ReservoirConfig& config, const fs::path& dir) {
    NarmaOptions opt;
    opt.ts = parse_duration(a.ts);
    NarmaResult r;
    try {
        r = narma10_benchmark(config, {a.samples, TruncatedNormal{0.5, 0.25, 0.0, 1.0}, a.seed}, opt);
    } catch (const RegenerationLimit& e) {
        return {{"status", "diverged"}, {"message", e.what()}};
    }
    write_trace(dir / "trace.csv", r.trace);
    write_json(dir / "weights.json", vec_json(r.weights));
    auto metrics_json = [](const Metrics& m) {
        json j{{"mse", m.mse}, {"rmse", m.rmse}, {"nrmse", nullptr}};
        if (m.nrmse)
            j["nrmse"] = *m.nrmse;
        return j;
    };
    return {{"status", "ok"},
            {"test", metrics_json(r.test)},
            {"train", metrics_json(r.train)},
            {"input_seed", r.input_seed},
            {"regenerations", r.regenerations},
            {"target_input_scale", opt.target_input_scale}};
}

json run_force(const RunArgs& a, const ReservoirConfig& config, const fs::path& dir) {
    ForceOptions opt;
    opt.freq_hz = parse_frequency(a.freq);
    opt.ts = parse_duration(a.ts);
    opt.teach_cycles = a.teach_cycles;
    opt.test_cycles = a.test_cycles;
    opt.alpha = a.alpha;
    opt.arithmetic = a.arithmetic == "fixed" ? Arithmetic::fixed_point : Arithmetic::float64;
    opt.probes.erase(std::remove_if(opt.probes.begin(), opt.probes.end(),
                                    [&](std::size_t p) { return p >= config.neurons(); }),
                     opt.probes.end());
    ForceResult r;
    try {
        r = force_run(config, opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    write_stream(dir / "trace.csv", [&](std::ostream& os) { write_force_csv(os, r, opt.probes); });
    write_json(dir / "weights.json", {{"after_teach", vec_json(r.weights_after_teach)},
                                      {"after_test", vec_json(r.weights_after_test)}});
    json j{{"correlation", nullptr},
           {"degenerate", r.degenerate},
           {"teach_samples", r.teach_samples},
           {"test_samples", r.test_samples},
           {"clamped", r.clamped}};
    if (r.correlation)
        j["correlation"] = *r.correlation;
    return j;
}

/// Runs one benchmark into `dir`. Returns the summary.
json execute(const RunArgs& a, const fs::path& dir, const std::vector<std::string>& command) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto config = obtain_config(a);
    make_dir(dir);

    json summary;
    try {
        if (a.task == "mc")
            summary = run_mc(a, config, dir);
        else if (a.task == "nlmc")
            summary = run_nlmc(a, config, dir);
        else if (a.task == "narma10")
            summary = run_narma(a, config, dir);
        else
            summary = run_force(a, config, dir);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    summary["task"] = a.task;
    summary["parameters"] = parameters_json(a);
    summary["config_hash"] = config_hash(config);
    write_json(dir / "summary.json", summary);
    write_text_config(dir / "config.json", config);

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(dir / "manifest.json", {{"tool", "lifrc"},
                                       {"version", LIFRC_VERSION},
                                       {"command", command},
                                       {"config_hash", config_hash(config)},
                                       {"config_file", "config.json"},
                                       {"seeds", {{"input", a.seed}, {"simulation", config.seed}}},
                                       {"parameters", parameters_json(a)},
                                       {"duration_seconds", duration}});
    return summary;
}

struct SweepRange {
    std::string key;
    std::uint64_t lo = 0, hi = 0;
};

SweepRange parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    const auto dots = text.find("..");
    if (eq == std::string::npos || dots == std::string::npos || dots < eq)
        throw UsageError("--sweep expects key=a..b, got '" + text + "'");
    SweepRange r;
    r.key = text.substr(0, eq);
    if (r.key != "seed" && r.key != "reservoir_seed")
        throw UsageError("--sweep key must be seed or reservoir_seed");
    try {
        r.lo = std::stoull(text.substr(eq + 1, dots - eq - 1));
        r.hi = std::stoull(text.substr(dots + 2));
    } catch (const std::exception&) {
        throw UsageError("--sweep bounds must be integers: '" + text + "'");
    }
    if (r.hi < r.lo)
        throw UsageError("--sweep range is empty");
    return r;
}

int classify(const std::exception_ptr& e, std::string& message) {
    try {
        std::rethrow_exception(e);
    } catch (const UsageError& x) {
        message = x.what();
        return kUsage;
    } catch (const ConfigError& x) {
        message = x.what();
        return kConfig;
    } catch (const IoError& x) {
        message = x.what();
        return kIo;
    } catch (const ConfigIoError& x) {
        message = x.what();
        return kIo;
    } catch (const fs::filesystem_error& x) {
        message = x.what();
        return kIo;
    } catch (const std::exception& x) {
        message = x.what();
        return kRuntime;
    }
}

int run_sweep(const RunArgs& base, const fs::path& root, const std::vector<std::string>& command) {
    const auto range = parse_sweep(base.sweep);
    std::vector<std::uint64_t> values;
    for (std::uint64_t v = range.lo; v <= range.hi; ++v)
        values.push_back(v);
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(values.size(), std::thread::hardware_concurrency()));

    std::vector<int> codes(values.size(), kOk);
    std::vector<std::string> errors(values.size());
    std::atomic<std::size_t> next{0};
    std::mutex log;
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            RunArgs a = base;
            (range.key == "seed" ? a.seed : a.reservoir_seed) = values[i];
            const fs::path dir = root / (range.key + "-" + std::to_string(values[i]));
            try {
                execute(a, dir, command);
                const std::lock_guard lock(log);
                std::cout << dir.string() << '\n';
            } catch (...) {
                codes[i] = classify(std::current_exception(), errors[i]);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    int worst = kOk;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (codes[i] != kOk) {
            std::cerr << "lifrc: " << range.key << '=' << values[i] << ": " << errors[i] << '\n';
            worst = std::max(worst, codes[i]);
        }
    return worst;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::size_t n = 100;
    double density = ReservoirSpec{}.connection_density;
    std::uint64_t seed = 1;
    std::string out;
};

void execute_gen(const GenArgs& g, const std::vector<std::string>& command) {
    const auto t0 = std::chrono::steady_clock::now();
    ReservoirSpec spec;
    spec.n_neurons = g.n;
    spec.connection_density = g.density;
    spec.seed = g.seed;
    ReservoirConfig config;
    try {
        config = random_reservoir(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const fs::path dir(g.out);
    make_dir(dir);
    write_bitstream(dir / "reservoir.rcfg", config);
    write_text_config(dir / "reservoir.json", config);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(dir / "manifest.json", {{"tool", "lifrc"},
                                       {"version", LIFRC_VERSION},
                                       {"command", command},
                                       {"config_hash", config_hash(config)},
                                       {"seeds", {{"reservoir", g.seed}}},
                                       {"parameters", {{"n", g.n}, {"density", g.density}, {"seed", g.seed}}},
                                       {"duration_seconds", duration}});
}

// ---------------------------------------------------------------------------
// rerun

json read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read manifest " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

int execute_rerun(const std::string& manifest_path, const std::string& out_dir,
                  const std::vector<std::string>& command) {
    const fs::path mpath(manifest_path);
    const json m = read_manifest(mpath);
    RunArgs a;
    try {
        a = args_from_parameters(m.at("parameters"));
        a.config = (mpath.parent_path() / m.at("config_file").get<std::string>()).string();
    } catch (const json::exception& e) {
        throw ConfigError(mpath.string() + ": incomplete manifest: " + e.what());
    }
    resolve(a);
    // The config copy stands in for the original source; a reservoir drawn
    // from reservoir_seed is reproduced exactly by the copy as well.
    const auto config = obtain_config(a);
    if (config_hash(config) != m.value("config_hash", std::string()))
        throw ConfigError("config hash does not match manifest " + mpath.string());
    execute(a, out_dir, command);
    std::cout << out_dir << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> command(argv, argv + argc);
    command[0] = "lifrc";

    CLI::App app{"Behavioral LIF reservoir: configuration generation and benchmarks"};
    app.set_version_flag("--version", LIFRC_VERSION);
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Draw a random reservoir and write .rcfg + text config");
    gen_cmd->add_option("--n", gen.n, "Neuron count")->check(CLI::Range(1, 65535));
    gen_cmd->add_option("--density", gen.density, "Connection probability per neuron pair")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a benchmark and write summary, traces and manifest");
    run_cmd->add_option("task", run.task, "force | mc | nlmc | narma10")
        ->required()
        ->check(CLI::IsMember({"force", "mc", "nlmc", "narma10"}));
    run_cmd->add_option("--config", run.config, "Config file (.rcfg or text); default reservoir if omitted");
    run_cmd->add_option("--reservoir-seed", run.reservoir_seed, "Seed of the default reservoir");
    run_cmd->add_option("--ts", run.ts, "Sample period, e.g. 120us or 0.05ms");
    run_cmd->add_option("--samples", run.samples, "Sequence length T (open-loop tasks)");
    run_cmd->add_option("--teach-cycles", run.teach_cycles, "FORCE teaching cycles")->check(CLI::PositiveNumber);
    run_cmd->add_option("--test-cycles", run.test_cycles, "FORCE test cycles")->check(CLI::PositiveNumber);
    run_cmd->add_option("--alpha", run.alpha, "RLS P(0) scale")->check(CLI::PositiveNumber);
    run_cmd->add_option("--freq", run.freq, "FORCE teaching frequency, e.g. 220Hz");
    run_cmd->add_option("--arithmetic", run.arithmetic, "RLS arithmetic: float | fixed");
    run_cmd->add_option("--seed", run.seed, "Input sequence seed");
    run_cmd->add_option("--k-max", run.k_max, "Largest MC delay")->check(CLI::PositiveNumber);
    run_cmd->add_option("--d-max", run.d_max, "Largest NLMC degree")->check(CLI::Range(1, 64));
    run_cmd->add_option("--family-limit", run.family_limit, "NLMC strings per degree")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out-dir", run.out_dir, "Output directory (default $LIFRC_OUT_DIR or ./lifrc-out)");
    run_cmd->add_option("--sweep", run.sweep, "Run a seed range in parallel, e.g. seed=1..8");

    std::string manifest, rerun_out;
    auto* rerun_cmd = app.add_subcommand("rerun", "Reproduce a run from its manifest");
    rerun_cmd->add_option("manifest", manifest, "manifest.json of a previous run")->required();
    rerun_cmd->add_option("--out-dir", rerun_out, "Output directory (default $LIFRC_OUT_DIR or ./lifrc-out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen_cmd) {
            execute_gen(gen, command);
            std::cout << gen.out << '\n';
            return kOk;
        }
        if (*rerun_cmd)
            return execute_rerun(manifest, rerun_out.empty() ? default_out_dir() : rerun_out, command);

        resolve(run);
        const fs::path out = run.out_dir.empty() ? default_out_dir() : run.out_dir;
        if (!run.sweep.empty())
            return run_sweep(run, out, command);
        const auto summary = execute(run, out, command);
        std::cout << summary.dump(2) << '\n';
        return kOk;
    } catch (...) {
        std::string message;
        const int code = classify(std::current_exception(), message);
        std::cerr << "lifrc: " << message << '\n';
        return code;
    }
}
