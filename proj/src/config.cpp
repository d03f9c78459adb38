#include "lifrc/config.hpp"

#include <nlohmann/json.hpp>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

namespace lifrc {

using json = nlohmann::json;

void ReservoirSpec::validate() const {
    auto probability = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument(std::string("reservoir spec: ") + name + " must lie in [0, 1]");
    };
    if (n_neurons < 1 || n_neurons > 65535)
        throw std::invalid_argument("reservoir spec: n_neurons must lie in [1, 65535]");
    probability(connection_density, "connection_density");
    probability(excitation_fraction, "excitation_fraction");
    probability(input_density, "input_density");
    probability(input_excitation_fraction, "input_excitation_fraction");
    if (fixed_weight && (*fixed_weight < 0 || *fixed_weight > kMaxWeight))
        throw std::invalid_argument("reservoir spec: fixed weight out of range");
}

ReservoirConfig default_physical_config() {
    ReservoirConfig config;
    // Pulse charge calibrated against the benchmark suite; see README.
    config.neuron_params.eta = 5e3;
    return config;
}

ReservoirConfig random_reservoir(const ReservoirSpec& spec, const ReservoirConfig& physical) {
    spec.validate();
    ReservoirConfig config = physical;
    config.seed = spec.seed;
    config.fan_in_limit = spec.fan_in_limit;
    config.matrix = ConnectivityMatrix(spec.n_neurons);
    auto& m = config.matrix;
    const std::size_t n = spec.n_neurons;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> weight_draw(0, kMaxWeight);
    auto draw_weight = [&] { return spec.fixed_weight ? *spec.fixed_weight : weight_draw(rng); };

    for (std::size_t dst = 0; dst < n; ++dst) {
        for (std::size_t src = 0; src < n + 2; ++src) {
            const bool input = src >= n;
            if (!input && src == dst && !config.allow_self_connections)
                continue;
            if (!(coin(rng) < (input ? spec.input_density : spec.connection_density)))
                continue;
            bool excite;
            if (!input)
                excite = coin(rng) < spec.excitation_fraction;
            else if (spec.random_input_polarity)
                excite = coin(rng) < spec.input_excitation_fraction;
            else
                excite = src == m.exc_input();
            const int w = draw_weight();
            m.set(dst, src, excite ? ConnectionEntry::excite(w) : ConnectionEntry::inhibit(w));
        }
    }

    if (spec.fan_in_limit == 0)
        return config;
    for (std::size_t dst = 0; dst < n; ++dst) {
        for (auto kind : {ConnectionKind::excitation, ConnectionKind::inhibition}) {
            std::vector<std::pair<int, std::size_t>> links;
            for (std::size_t src = 0; src < n + 2; ++src)
                if (m.at(dst, src).kind == kind)
                    links.emplace_back(m.at(dst, src).weight, src);
            if (links.size() <= spec.fan_in_limit)
                continue;
            std::sort(links.begin(), links.end());
            const std::size_t excess = links.size() - spec.fan_in_limit;
            for (std::size_t i = 0; i < excess; ++i)
                m.set(dst, links[i].second, {});
        }
    }
    return config;
}

std::vector<Violation> validate(const ReservoirConfig& config) {
    std::vector<Violation> out;
    const auto& m = config.matrix;
    const std::size_t n = m.neurons();

    if (n == 0)
        out.push_back({Violation::Kind::shape, {}, {}, "reservoir has no neurons"});
    try {
        config.neuron_params.validate();
    } catch (const std::invalid_argument& e) {
        out.push_back({Violation::Kind::neuron_params, {}, {}, e.what()});
    }
    const double period = 1.0 / config.input_max_freq;
    if (!(config.input_max_freq > 0.0))
        out.push_back({Violation::Kind::timing, {}, {}, "input_max_freq must be positive"});
    if (!(config.microstep > 0.0) || config.microstep > 0.5 * period)
        out.push_back({Violation::Kind::timing, {}, {},
                       "microstep must be positive and at most 1/(2F)"});
    if (!(config.delay_unit > 0.0) || !(config.delay_unit * 16 < period))
        out.push_back({Violation::Kind::timing, {}, {},
                       "delay_unit * 16 must be shorter than 1/F"});
    if (config.noise_sigma < 0.0)
        out.push_back({Violation::Kind::neuron_params, {}, {}, "noise_sigma must be non-negative"});
    if (!(config.readout.f_base > 0.0) || config.readout.saturation < 1)
        out.push_back({Violation::Kind::timing, {}, {}, "readout clock and saturation must be positive"});

    for (std::size_t dst = 0; dst < n; ++dst) {
        std::size_t exc = 0, inh = 0;
        for (std::size_t src = 0; src < n + 2; ++src) {
            const auto& e = m.at(dst, src);
            if (!e.connected())
                continue;
            if (e.weight > kMaxWeight)
                out.push_back({Violation::Kind::weight_range, dst, src,
                               "weight " + std::to_string(e.weight) + " out of range on link " +
                                   std::to_string(src) + "->" + std::to_string(dst)});
            if (src == dst && !config.allow_self_connections)
                out.push_back({Violation::Kind::self_connection, dst, src,
                               "self connection on neuron " + std::to_string(dst)});
            (e.kind == ConnectionKind::excitation ? exc : inh) += 1;
        }
        if (config.fan_in_limit == 0)
            continue;
        if (exc > config.fan_in_limit)
            out.push_back({Violation::Kind::fan_in, dst, {},
                           "neuron " + std::to_string(dst) + " has " + std::to_string(exc) +
                               " excitatory inputs (limit " + std::to_string(config.fan_in_limit) + ")"});
        if (inh > config.fan_in_limit)
            out.push_back({Violation::Kind::fan_in, dst, {},
                           "neuron " + std::to_string(dst) + " has " + std::to_string(inh) +
                               " inhibitory inputs (limit " + std::to_string(config.fan_in_limit) + ")"});
    }
    return out;
}

// --- bitstream -------------------------------------------------------------

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'R', 'C', 'F', 'G'};
constexpr std::size_t kHeaderSize = 4 + 1 + 2 + 4;
constexpr std::size_t kRecordSize = 5;
constexpr std::size_t kCrcSize = 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint16_t get_u16(const std::vector<std::uint8_t>& in, std::size_t at) {
    return static_cast<std::uint16_t>(in[at] << 8 | in[at + 1]);
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
    return std::uint32_t{in[at]} << 24 | std::uint32_t{in[at + 1]} << 16 |
           std::uint32_t{in[at + 2]} << 8 | std::uint32_t{in[at + 3]};
}

} // namespace

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
    return static_cast<std::uint32_t>(::crc32(0L, data, static_cast<uInt>(size)));
}

std::vector<std::uint8_t> serialize(const ConnectivityMatrix& matrix) {
    const std::size_t n = matrix.neurons();
    if (n > 65535)
        throw std::invalid_argument("serialize: neuron count exceeds 16-bit field");
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(kBitstreamVersion);
    put_u16(out, static_cast<std::uint16_t>(n));
    put_u32(out, static_cast<std::uint32_t>(matrix.connection_count()));
    for (std::size_t dst = 0; dst < n; ++dst) {
        for (std::size_t src = 0; src < n + 2; ++src) {
            const auto& e = matrix.at(dst, src);
            if (!e.connected())
                continue;
            if (e.weight > kMaxWeight)
                throw std::invalid_argument("serialize: weight out of range");
            put_u16(out, static_cast<std::uint16_t>(src));
            put_u16(out, static_cast<std::uint16_t>(dst));
            const std::uint8_t flags =
                (e.kind == ConnectionKind::inhibition ? 0x80 : 0x00) | (e.weight & 0x0F);
            out.push_back(flags);
        }
    }
    put_u32(out, crc32_of(out.data(), out.size()));
    return out;
}

ConnectivityMatrix deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHeaderSize + kCrcSize)
        throw BitstreamError(bytes.size(), "truncated bitstream");
    for (std::size_t i = 0; i < kMagic.size(); ++i)
        if (bytes[i] != kMagic[i])
            throw BitstreamError(i, "bad magic");
    if (bytes[4] != kBitstreamVersion)
        throw BitstreamError(4, "unsupported version " + std::to_string(bytes[4]));
    const std::size_t n = get_u16(bytes, 5);
    const std::size_t count = get_u32(bytes, 7);
    if (bytes.size() != kHeaderSize + count * kRecordSize + kCrcSize)
        throw BitstreamError(7, "record count " + std::to_string(count) +
                                    " does not match stream length " + std::to_string(bytes.size()));
    const std::size_t crc_at = bytes.size() - kCrcSize;
    if (get_u32(bytes, crc_at) != crc32_of(bytes.data(), crc_at))
        throw BitstreamError(crc_at, "CRC mismatch");
    if (n == 0)
        throw BitstreamError(5, "zero neuron count");

    ConnectivityMatrix m(n);
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t at = kHeaderSize + r * kRecordSize;
        const std::size_t src = get_u16(bytes, at);
        const std::size_t dst = get_u16(bytes, at + 2);
        const std::uint8_t flags = bytes[at + 4];
        if (src >= n + 2)
            throw BitstreamError(at, "source index " + std::to_string(src) + " out of range");
        if (dst >= n)
            throw BitstreamError(at + 2, "destination index " + std::to_string(dst) + " out of range");
        if (flags & 0x70)
            throw BitstreamError(at + 4, "reserved flag bits set");
        if (m.at(dst, src).connected())
            throw BitstreamError(at, "duplicate link " + std::to_string(src) + "->" + std::to_string(dst));
        const int w = flags & 0x0F;
        m.set(dst, src, (flags & 0x80) ? ConnectionEntry::inhibit(w) : ConnectionEntry::excite(w));
    }
    return m;
}

ReservoirConfig deserialize_config(const std::vector<std::uint8_t>& bytes,
                                   const ReservoirConfig& physical) {
    ReservoirConfig config = physical;
    config.matrix = deserialize(bytes);
    return config;
}

// --- text config -----------------------------------------------------------

namespace {

json vco_to_json(const LinearVcoModel& m) {
    return {{"slope", m.slope},
            {"intercept", m.intercept},
            {"flat_threshold", m.flat_threshold},
            {"flat_side", m.flat_side == FlatSide::below ? "below" : "above"}};
}

LinearVcoModel vco_from_json(const json& j) {
    LinearVcoModel m;
    m.slope = j.at("slope").get<double>();
    m.intercept = j.at("intercept").get<double>();
    m.flat_threshold = j.at("flat_threshold").get<double>();
    const auto side = j.at("flat_side").get<std::string>();
    if (side != "below" && side != "above")
        throw std::invalid_argument("config: flat_side must be 'below' or 'above'");
    m.flat_side = side == "below" ? FlatSide::below : FlatSide::above;
    return m;
}

} // namespace

std::string to_text(const ReservoirConfig& c) {
    const auto& p = c.neuron_params;
    json links = json::array();
    const auto& m = c.matrix;
    for (std::size_t dst = 0; dst < m.neurons(); ++dst)
        for (std::size_t src = 0; src < m.sources(); ++src) {
            const auto& e = m.at(dst, src);
            if (e.connected())
                links.push_back({src, dst, e.kind == ConnectionKind::excitation ? "exc" : "inh",
                                 e.weight});
        }
    json j = {
        {"format", "lifrc-config"},
        {"version", 1},
        {"neurons", m.neurons()},
        {"neuron",
         {{"v_cc", p.v_cc},
          {"v_rest", p.v_rest},
          {"tau_leak", p.tau_leak},
          {"eta", p.eta},
          {"vco_pos", vco_to_json(p.vco_pos)},
          {"vco_neg", vco_to_json(p.vco_neg)}}},
        {"fabric",
         {{"delay_unit", c.delay_unit},
          {"input_max_freq", c.input_max_freq},
          {"microstep", c.microstep},
          {"seed", c.seed},
          {"noise_sigma", c.noise_sigma},
          {"fan_in_limit", c.fan_in_limit},
          {"allow_self_connections", c.allow_self_connections}}},
        {"readout", {{"f_base", c.readout.f_base}, {"saturation", c.readout.saturation}}},
        {"connections", links},
    };
    return j.dump(1) + "\n";
}

ReservoirConfig from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    try {
        if (j.value("format", "") != "lifrc-config")
            throw std::invalid_argument("config: not a lifrc-config document");
        ReservoirConfig c;
        const auto n = j.at("neurons").get<std::size_t>();
        c.matrix = ConnectivityMatrix(n);
        const auto& jn = j.at("neuron");
        auto& p = c.neuron_params;
        p.v_cc = jn.at("v_cc").get<double>();
        p.v_rest = jn.at("v_rest").get<double>();
        p.tau_leak = jn.at("tau_leak").get<double>();
        p.eta = jn.at("eta").get<double>();
        p.vco_pos = vco_from_json(jn.at("vco_pos"));
        p.vco_neg = vco_from_json(jn.at("vco_neg"));
        const auto& jf = j.at("fabric");
        c.delay_unit = jf.at("delay_unit").get<double>();
        c.input_max_freq = jf.at("input_max_freq").get<double>();
        c.microstep = jf.at("microstep").get<double>();
        c.seed = jf.at("seed").get<std::uint64_t>();
        c.noise_sigma = jf.at("noise_sigma").get<double>();
        c.fan_in_limit = jf.at("fan_in_limit").get<std::size_t>();
        c.allow_self_connections = jf.at("allow_self_connections").get<bool>();
        const auto& jr = j.at("readout");
        c.readout.f_base = jr.at("f_base").get<double>();
        c.readout.saturation = jr.at("saturation").get<std::uint32_t>();
        for (const auto& link : j.at("connections")) {
            const auto src = link.at(0).get<std::size_t>();
            const auto dst = link.at(1).get<std::size_t>();
            const auto kind = link.at(2).get<std::string>();
            const auto w = link.at(3).get<int>();
            if (dst >= n || src >= n + 2)
                throw std::invalid_argument("config: link index out of range");
            if (kind != "exc" && kind != "inh")
                throw std::invalid_argument("config: link kind must be 'exc' or 'inh'");
            if (w < 0 || w > 255)
                throw std::invalid_argument("config: link weight out of range");
            // Out-of-range 4-bit weights are kept so validate() can report them.
            c.matrix.raw(dst, src) = {kind == "exc" ? ConnectionKind::excitation
                                                    : ConnectionKind::inhibition,
                                      static_cast<std::uint8_t>(w)};
        }
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

std::string config_hash(const ReservoirConfig& config) {
    const std::string text = to_text(config);
    const auto crc = crc32_of(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    return buf;
}

ReservoirConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigIoError("cannot open config " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (path.extension() == ".rcfg")
        return deserialize_config(bytes);
    return from_text(std::string(bytes.begin(), bytes.end()));
}

void write_bitstream(const std::filesystem::path& path, const ReservoirConfig& config) {
    const auto bytes = serialize(config.matrix);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigIoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ConfigIoError("write failed for " + path.string());
}

void write_text_config(const std::filesystem::path& path, const ReservoirConfig& config) {
    std::ofstream out(path);
    if (!out)
        throw ConfigIoError("cannot write " + path.string());
    out << to_text(config);
    if (!out)
        throw ConfigIoError("write failed for " + path.string());
}

} // namespace lifrc
