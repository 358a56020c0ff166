// ddstc - command-line front end: simulate, sweep, snr-surface, plot.

#include "ddstc/analysis.hpp"
#include "ddstc/config.hpp"
#include "ddstc/errors.hpp"
#include "ddstc/harness.hpp"
#include "ddstc/plot.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

using namespace ddstc;

constexpr int exit_config = 2;
constexpr int exit_io = 3;

struct CommonOptions {
    std::string config_file;
    std::map<std::string, std::string> values;
    bool noiseless = false;
};

const std::map<std::string, std::string> option_help{
    {"scheme", "proposed, conventional, coherent (comma list for sweep)"},
    {"n", "subcarriers N"},
    {"cp", "cyclic prefix length L (must exceed delay-int)"},
    {"constellation", "bpsk, qpsk or psk8"},
    {"beta", "raised-cosine roll-off"},
    {"tau", "fractional relay-2 delay in Ts (comma list)"},
    {"delay-int", "whole-sample relay-2 delay d"},
    {"doppler", "normalized Doppler fd Ts"},
    {"fading-timebase", "block or symbol"},
    {"oscillators", "sinusoids per Jakes process"},
    {"snr-db", "P/N0 values in dB (comma list)"},
    {"split", "source,relay power fractions of P"},
    {"min-errors", "stop once this many bit errors are counted"},
    {"min-streams", "independent fading streams required before min-errors applies"},
    {"max-bits", "payload bit cap per point"},
    {"seed", "master seed"},
    {"workers", "OpenMP threads (0 = runtime default)"},
    {"blocks-per-stream", "blocks per fading stream, reference included"},
    {"streams-per-batch", "streams between stop-rule checks"},
    {"tau-points", "tau grid size for snr-surface"},
    {"g1-power", "|g1|^2 for snr-surface"},
    {"g2-power", "|g2|^2 for snr-surface"},
    {"out", "output path (stdout when omitted)"},
};

void add_config_options(CLI::App* cmd, CommonOptions& opts)
{
    cmd->add_option("--config", opts.config_file, "key = value configuration file (flags override it)");
    for (const auto& key : harness::config_keys()) {
        if (key == "noiseless") {
            cmd->add_flag("--noiseless", opts.noiseless, "disable all additive noise");
        } else {
            const auto help = option_help.find(key);
            cmd->add_option("--" + key, opts.values[key], help == option_help.end() ? "" : help->second);
        }
    }
}

harness::SimConfig build_config(CLI::App* cmd, const CommonOptions& opts, harness::SimConfig base)
{
    if (!opts.config_file.empty()) {
        harness::apply_file(base, opts.config_file);
    }
    for (const auto& [key, value] : opts.values) {
        if (cmd->count("--" + key) > 0) {
            harness::apply_setting(base, key, value);
        }
    }
    if (opts.noiseless) {
        base.noiseless = true;
    }
    return base;
}

// Runs `emit` against the --out file, or stdout when none is set.
template <typename F>
void with_output(const std::string& path, F&& emit)
{
    if (path.empty()) {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw harness::IoError(fmt::format("cannot open '{}' for writing", path));
    }
    emit(out);
    out.flush();
    if (!out) {
        throw harness::IoError(fmt::format("write to '{}' failed", path));
    }
}

void run_grid(const harness::SimConfig& cfg)
{
    harness::validate(cfg);
    std::vector<harness::BerPoint> points;
    for (auto scheme : cfg.schemes) {
        const auto taus = scheme == harness::Scheme::coherent ? std::vector<double>{0.0} : cfg.taus;
        for (double tau : taus) {
            for (double snr : cfg.snr_db) {
                auto p = harness::run_point(cfg, scheme, tau, snr);
                std::cerr << fmt::format("{} tau={:g} {:g} dB: {}/{} ber={:.3e}\n", harness::to_string(scheme), tau,
                                         snr, p.bit_errors, p.payload_bits, p.ber);
                points.push_back(p);
            }
        }
    }
    with_output(cfg.out, [&](std::ostream& os) { harness::write_ber_csv(os, points); });
}

void run_surface(const harness::SimConfig& cfg, bool snr_given)
{
    harness::validate(cfg);
    analysis::SurfaceConfig sc;
    sc.subcarriers = cfg.subcarriers;
    sc.cp_len = cfg.cp_len;
    if (snr_given) {
        if (cfg.snr_db.size() != 1) {
            throw ConfigError("snr-surface takes a single snr-db value");
        }
        sc.p_over_n0_db = cfg.snr_db.front();
    }
    sc.source_fraction = cfg.source_fraction;
    sc.relay_fraction = cfg.relay_fraction;
    sc.gains = {cfg.g1_power, cfg.g2_power};
    sc.beta = cfg.beta;
    sc.tau_points = cfg.tau_points;
    const auto surface = analysis::snr_surface(sc);
    with_output(cfg.out, [&](std::ostream& os) { analysis::write_surface_csv(os, surface); });
}

void run_plot(const std::string& input, const std::string& output)
{
    std::ifstream in(input, std::ios::binary);
    if (!in) {
        throw harness::IoError(fmt::format("cannot read '{}'", input));
    }
    std::string header;
    std::getline(in, header);
    in.clear();
    in.seekg(0);
    if (header == "n,tau_over_Ts,gamma_db") {
        const auto surface = plot::read_surface_csv(in);
        with_output(output, [&](std::ostream& os) { plot::write_surface_svg(os, surface); });
    } else {
        const auto points = harness::read_ber_csv(in);
        with_output(output, [&](std::ostream& os) { plot::write_ber_svg(os, points); });
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Differential OFDM distributed space-time coding simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "BER of one scheme at one tau over the snr-db list");
    add_config_options(simulate, sim_opts);

    CommonOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "BER grid: schemes x tau x snr-db (CSV)");
    add_config_options(sweep, sweep_opts);

    CommonOptions surf_opts;
    auto* surface = app.add_subcommand("snr-surface", "closed-form per-subcarrier SNR over tau (CSV)");
    add_config_options(surface, surf_opts);

    std::string plot_in;
    std::string plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "render a BER or surface CSV as SVG");
    plot_cmd->add_option("input", plot_in, "CSV file from sweep/simulate/snr-surface")->required();
    plot_cmd->add_option("--out", plot_out, "SVG path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*simulate) {
            const auto cfg = build_config(simulate, sim_opts, harness::SimConfig{});
            if (cfg.schemes.size() != 1 || cfg.taus.size() != 1) {
                throw ConfigError("simulate takes one scheme and one tau; use sweep for grids");
            }
            run_grid(cfg);
        } else if (*sweep) {
            run_grid(build_config(sweep, sweep_opts, harness::fig6_defaults()));
        } else if (*surface) {
            auto base = harness::SimConfig{};
            const auto default_snr = base.snr_db;
            const auto cfg = build_config(surface, surf_opts, base);
            run_surface(cfg, cfg.snr_db != default_snr);
        } else if (*plot_cmd) {
            run_plot(plot_in, plot_out);
        }
    } catch (const harness::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
