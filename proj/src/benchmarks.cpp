#include "lifrc/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

namespace lifrc {

std::vector<double> gen_input(const InputSequenceSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<double> u;
    u.reserve(spec.length);
    std::visit(
        [&](const auto& dist) {
            using D = std::decay_t<decltype(dist)>;
            if (!(dist.lo < dist.hi))
                throw std::invalid_argument("gen_input: empty range");
            if constexpr (std::is_same_v<D, TruncatedNormal>) {
                if (!(dist.sigma > 0.0))
                    throw std::invalid_argument("gen_input: sigma must be positive");
                std::normal_distribution<double> normal(dist.mu, dist.sigma);
                while (u.size() < spec.length) {
                    const double x = normal(rng);
                    if (x >= dist.lo && x <= dist.hi)
                        u.push_back(x);
                }
            } else {
                std::uniform_real_distribution<double> uniform(dist.lo, dist.hi);
                while (u.size() < spec.length)
                    u.push_back(uniform(rng));
            }
        },
        spec.distribution);
    return u;
}

std::vector<double> mc_target(std::span<const double> u, std::size_t k) {
    if (k < 1)
        throw std::invalid_argument("mc_target: delay must be at least 1");
    std::vector<double> z(u.size(), 0.0);
    for (std::size_t n = k; n < u.size(); ++n)
        z[n] = u[n - k];
    return z;
}

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* who) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(who) + ": series lengths differ");
}

double mean(std::span<const double> a) {
    return std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
}

} // namespace

Score capacity(std::span<const double> z, std::span<const double> z_p) {
    require_same_length(z, z_p, "capacity");
    if (z.size() < 2)
        throw std::invalid_argument("capacity: need at least two samples");
    const double mz = mean(z), mp = mean(z_p);
    double cov = 0.0, vz = 0.0, vp = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double a = z[i] - mz, b = z_p[i] - mp;
        cov += a * b;
        vz += a * a;
        vp += b * b;
    }
    if (vz <= 0.0 || vp <= 0.0)
        return {0.0, true};
    return {std::clamp(cov * cov / (vz * vp), 0.0, 1.0), false};
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "pearson");
    if (a.size() < 2)
        return std::nullopt;
    const double ma = mean(a), mb = mean(b);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] - ma, y = b[i] - mb;
        cov += x * y;
        va += x * x;
        vb += y * y;
    }
    if (va <= 0.0 || vb <= 0.0)
        return std::nullopt;
    return cov / std::sqrt(va * vb);
}

double legendre(int degree, double x) {
    if (degree < 0)
        throw std::invalid_argument("legendre: negative degree");
    if (!(std::abs(x) <= 1.0))
        throw std::invalid_argument("legendre: |x| must not exceed 1");
    if (degree == 0)
        return 1.0;
    double prev = 1.0, cur = x;
    for (int d = 1; d < degree; ++d) {
        const double next = ((2 * d + 1) * x * cur - d * prev) / (d + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

DegreeString::DegreeString(std::vector<std::pair<std::size_t, int>> entries)
    : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].first < 1)
            throw std::invalid_argument("degree string: delays start at 1");
        if (entries_[i].second < 1)
            throw std::invalid_argument("degree string: degrees must be at least 1");
        if (i > 0 && entries_[i].first == entries_[i - 1].first)
            throw std::invalid_argument("degree string: duplicate delay");
    }
}

int DegreeString::total_degree() const {
    int d = 0;
    for (const auto& e : entries_)
        d += e.second;
    return d;
}

std::string DegreeString::to_string() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < entries_.size(); ++i)
        out << (i ? " " : "") << entries_[i].first << ':' << entries_[i].second;
    out << '}';
    return out.str();
}

std::vector<double> nlmc_target(std::span<const double> u, const DegreeString& ds) {
    std::vector<double> z(u.size(), 1.0);
    for (std::size_t n = 0; n < u.size(); ++n) {
        for (const auto& [k, d] : ds.entries()) {
            if (n < k) {
                z[n] = 0.0;
                break;
            }
            z[n] *= legendre(d, u[n - k]);
        }
    }
    return z;
}

Score nlmc_capacity(std::span<const double> z, std::span<const double> z_p) {
    require_same_length(z, z_p, "nlmc_capacity");
    if (z.empty())
        throw std::invalid_argument("nlmc_capacity: empty series");
    double energy = 0.0, err = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        energy += z[i] * z[i];
        err += (z_p[i] - z[i]) * (z_p[i] - z[i]);
    }
    if (energy <= 0.0)
        return {0.0, true};
    return {std::clamp(1.0 - err / energy, 0.0, 1.0), false};
}

std::vector<double> narma10_target(std::span<const double> u, double bound) {
    for (double x : u)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("narma10_target: inputs must lie in [0, 1]");
    const std::size_t t = u.size();
    std::vector<double> z(t, 0.0);
    for (std::size_t n = 9; n + 1 < t; ++n) {
        double window = 0.0;
        for (std::size_t i = 0; i < 10; ++i)
            window += z[n - i];
        z[n + 1] = 0.3 * z[n] + 0.05 * z[n] * window + 1.5 * u[n - 9] * u[n] + 0.1;
        if (!(std::abs(z[n + 1]) <= bound))
            throw TargetDiverged(n + 1);
    }
    return z;
}

Metrics metrics(std::span<const double> z, std::span<const double> z_p) {
    require_same_length(z, z_p, "metrics");
    if (z.empty())
        throw std::invalid_argument("metrics: empty series");
    double err = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        err += (z_p[i] - z[i]) * (z_p[i] - z[i]);
    Metrics m;
    m.mse = err / static_cast<double>(z.size());
    m.rmse = std::sqrt(m.mse);
    const double mz = mean(z);
    if (mz != 0.0)
        m.nrmse = m.rmse / mz;
    return m;
}

// --- drivers ---------------------------------------------------------------

namespace {

template <class R>
std::span<const double> rows_of(std::span<const double> s, const R& r) {
    return s.subspan(r.begin, r.size());
}

const char* split_label(const Split& s, std::size_t n) {
    if (s.train.contains(n))
        return "train";
    if (s.test.contains(n))
        return "test";
    return "ignore";
}

std::vector<TracePoint> make_trace(const Recording& rec, const Split& s,
                                   std::span<const double> z, const Eigen::VectorXd& z_p) {
    std::vector<TracePoint> trace;
    trace.reserve(z.size());
    for (std::size_t n = 0; n < z.size(); ++n)
        trace.push_back({n, rec.inputs[n], z[n], z_p[static_cast<Eigen::Index>(n)],
                         split_label(s, n)});
    return trace;
}

} // namespace

McResult mc_evaluate(const Recording& rec, const McOptions& options) {
    const Split s = split(rec.samples(), options.split);
    const Readout readout(rec, s.train, options.ridge);
    McResult result;
    result.trace_delays = options.trace_delays;
    result.traces.resize(options.trace_delays.size());
    for (std::size_t k = 1; k <= options.k_max; ++k) {
        const auto z = mc_target(rec.inputs, k);
        const Eigen::VectorXd w = readout.fit(z);
        const Eigen::VectorXd zp = readout.predict(w, s.test);
        const auto score = capacity(rows_of<TestRows>(z, s.test), {zp.data(), static_cast<std::size_t>(zp.size())});
        result.mc_k.push_back(score);
        result.weights.push_back(w);
        result.total_mc += score.value;
        for (std::size_t t = 0; t < options.trace_delays.size(); ++t)
            if (options.trace_delays[t] == k)
                result.traces[t] = make_trace(rec, s, z, readout.predict_all(w));
    }
    return result;
}

McResult mc_benchmark(const ReservoirConfig& config, const InputSequenceSpec& input,
                      const McOptions& options) {
    if (input.length < 10)
        throw std::invalid_argument("mc_benchmark: need at least 10 samples");
    const auto u = gen_input(input);
    return mc_evaluate(record(config, u, options.ts), options);
}

namespace {

// Appends all compositions of `degree` into `parts` positive integers.
void compositions(int degree, std::size_t parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(degree);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = 1; first <= degree - static_cast<int>(parts) + 1; ++first) {
        cur.push_back(first);
        compositions(degree - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<DegreeString> enumerate_degree_strings(int degree, std::size_t max_delay,
                                                   std::size_t max_distinct) {
    if (degree < 1)
        throw std::invalid_argument("enumerate_degree_strings: degree must be at least 1");
    std::vector<DegreeString> out;
    const std::size_t limit = std::min<std::size_t>(max_distinct, static_cast<std::size_t>(degree));
    std::vector<std::vector<std::vector<int>>> comps(limit + 1);
    for (std::size_t parts = 1; parts <= limit; ++parts) {
        std::vector<int> cur;
        compositions(degree, parts, cur, comps[parts]);
    }

    // For each largest delay m, choose the remaining delays below m in
    // descending order, then every composition of the degree over them.
    std::vector<std::size_t> delays;
    std::function<void(std::size_t)> extend = [&](std::size_t below) {
        const std::size_t parts = delays.size();
        for (const auto& c : comps[parts]) {
            std::vector<std::pair<std::size_t, int>> entries;
            for (std::size_t i = 0; i < parts; ++i)
                entries.emplace_back(delays[i], c[i]);
            out.emplace_back(std::move(entries));
        }
        if (parts == limit)
            return;
        for (std::size_t k = below; k-- > 1;) {
            delays.push_back(k);
            extend(k);
            delays.pop_back();
        }
    };
    for (std::size_t m = 1; m <= max_delay; ++m) {
        delays.assign(1, m);
        extend(m);
    }
    return out;
}

NlmcResult nlmc_evaluate(const Recording& rec, const NlmcOptions& options) {
    const std::size_t t = rec.samples();
    const Split s = split(t, options.split);
    const Readout readout(rec, s.train, options.ridge);

    // table[d][n] = P_d(u(n))
    std::vector<std::vector<double>> table(static_cast<std::size_t>(options.d_max) + 1,
                                           std::vector<double>(t));
    for (int d = 0; d <= options.d_max; ++d)
        for (std::size_t n = 0; n < t; ++n)
            table[static_cast<std::size_t>(d)][n] = legendre(d, rec.inputs[n]);

    NlmcResult result;
    {
        McOptions mc;
        static_cast<OpenLoopOptions&>(mc) = options;
        mc.trace_delays.clear();
        const auto linear = mc_evaluate(rec, mc);
        for (const auto& sc : linear.mc_k)
            result.linear_peak = std::max(result.linear_peak, sc.value);
    }

    std::vector<double> z(t);
    for (int d = 1; d <= options.d_max; ++d) {
        const auto family = enumerate_degree_strings(d, static_cast<std::size_t>(d) + options.delay_margin,
                                                     options.max_distinct_delays);
        DegreeResult dr;
        dr.degree = d;
        const std::size_t count = std::min(family.size(), options.family_limit);
        dr.overflow = family.size() - count;
        for (std::size_t f = 0; f < count; ++f) {
            const auto& ds = family[f];
            for (std::size_t n = 0; n < t; ++n) {
                double v = 1.0;
                for (const auto& [k, deg] : ds.entries()) {
                    if (n < k) {
                        v = 0.0;
                        break;
                    }
                    v *= table[static_cast<std::size_t>(deg)][n - k];
                }
                z[n] = v;
            }
            const Eigen::VectorXd w = readout.fit(z);
            const Eigen::VectorXd zp = readout.predict(w, s.test);
            const auto score = nlmc_capacity(std::span<const double>(z).subspan(s.test.begin, s.test.size()),
                                             {zp.data(), static_cast<std::size_t>(zp.size())});
            ++dr.evaluated;
            if (dr.evaluated == 1 || score.value > dr.max_capacity) {
                dr.max_capacity = score.value;
                dr.argmax = ds;
            }
        }
        result.per_degree.push_back(std::move(dr));
    }
    return result;
}

NlmcResult nlmc_benchmark(const ReservoirConfig& config, const InputSequenceSpec& input,
                          const NlmcOptions& options) {
    if (input.length < 100)
        throw std::invalid_argument("nlmc_benchmark: need at least 100 samples");
    const auto u = gen_input(input);
    return nlmc_evaluate(record(config, u, options.ts), options);
}

NarmaResult narma10_benchmark(const ReservoirConfig& config, const InputSequenceSpec& input,
                              const NarmaOptions& options) {
    NarmaResult result;
    std::vector<double> u, z;
    InputSequenceSpec spec = input;
    for (;; ++spec.seed, ++result.regenerations) {
        if (result.regenerations > options.max_regenerations)
            throw RegenerationLimit("narma10: no bounded target within the regeneration limit");
        u = gen_input(spec);
        std::vector<double> scaled(u.size());
        std::transform(u.begin(), u.end(), scaled.begin(),
                       [&](double x) { return x * options.target_input_scale; });
        try {
            z = narma10_target(scaled, options.divergence_bound);
            break;
        } catch (const TargetDiverged&) {
        }
    }
    result.input_seed = spec.seed;

    const Recording rec = record(config, u, options.ts);
    const Split s = split(rec.samples(), options.split);
    const Readout readout(rec, s.train, options.ridge);
    const Eigen::VectorXd w = readout.fit(z);
    const Eigen::VectorXd zp = readout.predict_all(w);
    const std::span<const double> zs(z), ps(zp.data(), static_cast<std::size_t>(zp.size()));
    result.train = metrics(rows_of(zs, s.train), rows_of(ps, s.train));
    result.test = metrics(rows_of(zs, s.test), rows_of(ps, s.test));
    result.trace = make_trace(rec, s, z, zp);
    result.weights = w;
    return result;
}

} // namespace lifrc
