#include "ddstc/config.hpp"

#include "ddstc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ddstc::harness {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value)
{
    throw ConfigError(fmt::format("invalid value '{}' for '{}'", value, key));
}

double parse_double(std::string_view key, std::string_view value)
{
    value = trim(value);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
        bad_value(key, value);
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value)
{
    value = trim(value);
    // Accept scientific shorthand such as 2e6 for counts.
    if (value.find_first_of("eE.") != std::string_view::npos) {
        const double d = parse_double(key, value);
        if (d < static_cast<double>(std::numeric_limits<Int>::min())
            || d > static_cast<double>(std::numeric_limits<Int>::max()) || std::floor(d) != d) {
            bad_value(key, value);
        }
        return static_cast<Int>(d);
    }
    Int v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        bad_value(key, value);
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    value = trim(value);
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    bad_value(key, value);
}

std::vector<double> parse_doubles(std::string_view key, std::string_view value)
{
    std::vector<double> out;
    for (auto item : split_list(value)) {
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += fmt::format("{}{:.17g}", i ? "," : "", v[i]);
    }
    return out;
}

} // namespace

Scheme parse_scheme(std::string_view name)
{
    name = trim(name);
    if (name == "proposed") return Scheme::proposed;
    if (name == "conventional") return Scheme::conventional;
    if (name == "coherent") return Scheme::coherent;
    throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::conventional: return "conventional";
    case Scheme::coherent: return "coherent";
    }
    return "?";
}

FadingTimebase parse_timebase(std::string_view name)
{
    name = trim(name);
    if (name == "block") return FadingTimebase::block;
    if (name == "symbol") return FadingTimebase::symbol;
    throw ConfigError(fmt::format("unknown fading timebase '{}'", name));
}

std::string_view to_string(FadingTimebase t)
{
    return t == FadingTimebase::block ? "block" : "symbol";
}

SimConfig fig6_defaults()
{
    SimConfig c;
    c.schemes = {Scheme::proposed, Scheme::conventional, Scheme::coherent};
    c.taus = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    c.snr_db = {10.0, 15.0, 20.0, 25.0, 30.0};
    return c;
}

std::vector<std::string> config_keys()
{
    return {"scheme",     "n",           "cp",        "constellation", "beta",          "tau",
            "delay-int",  "doppler",     "fading-timebase", "oscillators", "snr-db",    "split",
            "min-errors", "min-streams", "max-bits",    "seed",      "workers",       "blocks-per-stream",
            "streams-per-batch", "noiseless", "tau-points", "g1-power", "g2-power",   "out"};
}

void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    if (key == "scheme") {
        cfg.schemes.clear();
        for (auto item : split_list(value)) {
            cfg.schemes.push_back(parse_scheme(item));
        }
    } else if (key == "n") {
        cfg.subcarriers = parse_int<std::size_t>(key, value);
    } else if (key == "cp") {
        cfg.cp_len = parse_int<int>(key, value);
    } else if (key == "constellation") {
        try {
            cfg.modulation = modem::parse_modulation(value);
        } catch (const std::invalid_argument&) {
            bad_value(key, value);
        }
    } else if (key == "beta") {
        cfg.beta = parse_double(key, value);
    } else if (key == "tau") {
        cfg.taus = parse_doubles(key, value);
    } else if (key == "delay-int") {
        cfg.delay_int = parse_int<int>(key, value);
    } else if (key == "doppler") {
        cfg.doppler = parse_double(key, value);
    } else if (key == "fading-timebase") {
        cfg.timebase = parse_timebase(value);
    } else if (key == "oscillators") {
        cfg.oscillators = parse_int<int>(key, value);
    } else if (key == "snr-db") {
        cfg.snr_db = parse_doubles(key, value);
    } else if (key == "split") {
        const auto v = parse_doubles(key, value);
        if (v.size() != 2) {
            bad_value(key, value);
        }
        cfg.source_fraction = v[0];
        cfg.relay_fraction = v[1];
    } else if (key == "min-errors") {
        cfg.min_errors = parse_int<std::uint64_t>(key, value);
    } else if (key == "min-streams") {
        cfg.min_streams = parse_int<std::uint64_t>(key, value);
    } else if (key == "max-bits") {
        cfg.max_bits = parse_int<std::uint64_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "workers") {
        cfg.workers = parse_int<int>(key, value);
    } else if (key == "blocks-per-stream") {
        cfg.blocks_per_stream = parse_int<std::size_t>(key, value);
    } else if (key == "streams-per-batch") {
        cfg.streams_per_batch = parse_int<std::size_t>(key, value);
    } else if (key == "noiseless") {
        cfg.noiseless = parse_bool(key, value);
    } else if (key == "tau-points") {
        cfg.tau_points = parse_int<std::size_t>(key, value);
    } else if (key == "g1-power") {
        cfg.g1_power = parse_double(key, value);
    } else if (key == "g2-power") {
        cfg.g2_power = parse_double(key, value);
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else {
        throw ConfigError(fmt::format("unknown configuration key '{}'", key));
    }
}

void apply_text(SimConfig& cfg, std::string_view text)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}: expected key = value", line_no));
        }
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_file(SimConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot read configuration file '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(cfg, ss.str());
}

void validate(const SimConfig& cfg)
{
    if (cfg.schemes.empty()) throw ConfigError("at least one scheme is required");
    if (cfg.subcarriers < 1) throw ConfigError("n must be >= 1");
    if (cfg.cp_len < 0 || static_cast<std::size_t>(cfg.cp_len) > cfg.subcarriers) {
        throw ConfigError("cp must lie in [0, n]");
    }
    if (cfg.delay_int < 0) throw ConfigError("delay-int must be >= 0");
    if (cfg.taus.empty()) throw ConfigError("tau grid is empty");
    for (double t : cfg.taus) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError(fmt::format("tau {} outside [0, 1]", t));
    }
    if (cfg.snr_db.empty()) throw ConfigError("snr-db grid is empty");
    if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
    if (!(cfg.doppler >= 0.0)) throw ConfigError("doppler must be >= 0");
    if (cfg.oscillators < 1) throw ConfigError("oscillators must be >= 1");
    if (!(cfg.source_fraction > 0.0) || !(cfg.relay_fraction > 0.0)) {
        throw ConfigError("split fractions must be > 0");
    }
    if (cfg.min_errors < 1) throw ConfigError("min-errors must be >= 1");
    if (cfg.max_bits < 1) throw ConfigError("max-bits must be >= 1");
    if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
    if (cfg.blocks_per_stream < 2) throw ConfigError("blocks-per-stream must be >= 2");
    if (cfg.streams_per_batch < 1) throw ConfigError("streams-per-batch must be >= 1");
    if (cfg.tau_points < 2) throw ConfigError("tau-points must be >= 2");
    if (!(cfg.g1_power >= 0.0) || !(cfg.g2_power >= 0.0)) throw ConfigError("link powers must be >= 0");
    if (!modem::Constellation::make(cfg.modulation).constant_modulus()) {
        throw ConfigError("differential decoding needs a PSK constellation: the unit-norm codeword "
                          "normalization discards amplitude");
    }
    for (auto s : cfg.schemes) {
        if (s == Scheme::proposed && cfg.cp_len <= cfg.delay_int) {
            throw ConfigError(fmt::format("cp ({}) must exceed delay-int ({})", cfg.cp_len, cfg.delay_int));
        }
        if (s != Scheme::proposed && cfg.delay_int != 0) {
            throw ConfigError(fmt::format("scheme '{}' models fractional delay only (delay-int must be 0)",
                                          to_string(s)));
        }
    }
}

std::string to_text(const SimConfig& cfg)
{
    std::string schemes;
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
        schemes += fmt::format("{}{}", i ? "," : "", to_string(cfg.schemes[i]));
    }
    std::string out;
    out += fmt::format("scheme = {}\n", schemes);
    out += fmt::format("n = {}\n", cfg.subcarriers);
    out += fmt::format("cp = {}\n", cfg.cp_len);
    out += fmt::format("constellation = {}\n", modem::to_string(cfg.modulation));
    out += fmt::format("beta = {:.17g}\n", cfg.beta);
    out += fmt::format("tau = {}\n", join_doubles(cfg.taus));
    out += fmt::format("delay-int = {}\n", cfg.delay_int);
    out += fmt::format("doppler = {:.17g}\n", cfg.doppler);
    out += fmt::format("fading-timebase = {}\n", to_string(cfg.timebase));
    out += fmt::format("oscillators = {}\n", cfg.oscillators);
    out += fmt::format("snr-db = {}\n", join_doubles(cfg.snr_db));
    out += fmt::format("split = {:.17g},{:.17g}\n", cfg.source_fraction, cfg.relay_fraction);
    out += fmt::format("min-errors = {}\n", cfg.min_errors);
    out += fmt::format("min-streams = {}\n", cfg.min_streams);
    out += fmt::format("max-bits = {}\n", cfg.max_bits);
    out += fmt::format("seed = {}\n", cfg.seed);
    out += fmt::format("workers = {}\n", cfg.workers);
    out += fmt::format("blocks-per-stream = {}\n", cfg.blocks_per_stream);
    out += fmt::format("streams-per-batch = {}\n", cfg.streams_per_batch);
    out += fmt::format("noiseless = {}\n", cfg.noiseless ? "true" : "false");
    out += fmt::format("tau-points = {}\n", cfg.tau_points);
    out += fmt::format("g1-power = {:.17g}\n", cfg.g1_power);
    out += fmt::format("g2-power = {:.17g}\n", cfg.g2_power);
    if (!cfg.out.empty()) {
        out += fmt::format("out = {}\n", cfg.out);
    }
    return out;
}

} // namespace ddstc::harness
