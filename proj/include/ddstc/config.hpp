// config.hpp - simulation configuration as flat `key = value` text.
//
// Every key doubles as a long CLI flag (`--key value`). List-valued keys
// take comma-separated values. Lines starting with '#' are comments.

#pragma once

#include "ddstc/modem.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddstc::harness {

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { proposed, conventional, coherent };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme s);

/// How the normalized Doppler advances between transmission blocks.
///   block:  the Jakes process steps by `doppler` per block.
///   symbol: it steps by `doppler` times the block duration in symbols.
enum class FadingTimebase { block, symbol };

FadingTimebase parse_timebase(std::string_view name);
std::string_view to_string(FadingTimebase t);

struct SimConfig {
    std::vector<Scheme> schemes{Scheme::proposed};
    std::size_t subcarriers = 64;
    int cp_len = 1;
    modem::Modulation modulation = modem::Modulation::bpsk;
    double beta = 0.9;
    std::vector<double> taus{0.0};
    int delay_int = 0;
    double doppler = 1e-3;
    FadingTimebase timebase = FadingTimebase::block;
    int oscillators = 32;
    std::vector<double> snr_db{10.0, 15.0, 20.0, 25.0, 30.0};
    double source_fraction = 0.5;
    double relay_fraction = 0.25;
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 2'000'000;
    // Errors within a stream share one fading realization; a point also
    // needs this many streams before min_errors may end it.
    std::uint64_t min_streams = 2048;
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t blocks_per_stream = 4;
    std::size_t streams_per_batch = 64;
    bool noiseless = false;
    // SNR surface only
    std::size_t tau_points = 101;
    double g1_power = 1.0;
    double g2_power = 1.0;
    std::string out;
};

/// Default grid reproducing the BER-vs-P/N0 experiment.
SimConfig fig6_defaults();

/// Applies one key/value; throws ConfigError on unknown keys or bad values.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines.
void apply_text(SimConfig& cfg, std::string_view text);

/// Throws IoError when the file cannot be read.
void apply_file(SimConfig& cfg, const std::filesystem::path& path);

/// Throws ConfigError on inconsistent settings (L <= d, tau outside [0, 1],
/// empty grids, ...).
void validate(const SimConfig& cfg);

/// Canonical `key = value` rendering; apply_text(to_text(c)) reproduces c.
std::string to_text(const SimConfig& cfg);

std::vector<std::string> config_keys();

} // namespace ddstc::harness
