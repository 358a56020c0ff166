#include "ddstc/analysis.hpp"

#include "ddstc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace ddstc::analysis {

LinkGains LinkGains::from(const channel::BlockChannel& ch) { return {std::norm(ch.g1), std::norm(ch.g2)}; }

double tap_power_c(std::size_t n, std::size_t subcarriers, double tau, const channel::PulseShape& pulse)
{
    if (subcarriers == 0 || n >= subcarriers) {
        throw std::domain_error("tap_power_c: need 0 <= n < N");
    }
    // |a + b e^{-jw}|^2 written symmetrically in (a, b), so that tau and
    // 1 - tau give bit-identical results.
    const double a = pulse(tau);
    const double b = pulse(1.0 - tau);
    const double w = 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(subcarriers);
    return std::max(0.0, a * a + b * b + 2.0 * a * b * std::cos(w));
}

double noise_variance(std::size_t n, std::size_t subcarriers, double tau, const LinkGains& gains,
                      const pipeline::PowerAllocation& alloc, const channel::PulseShape& pulse)
{
    const double c = tap_power_c(n, subcarriers, tau, pulse);
    const double a2 = alloc.gain * alloc.gain;
    return alloc.noise * (1.0 + a2 * (gains.g1_power + gains.g2_power * c));
}

double snr(std::size_t n, std::size_t subcarriers, double tau, const LinkGains& gains,
           const pipeline::PowerAllocation& alloc, const channel::PulseShape& pulse)
{
    const double c = tap_power_c(n, subcarriers, tau, pulse);
    const double a2 = alloc.gain * alloc.gain;
    const double g = gains.g1_power + gains.g2_power * c;
    return a2 * alloc.source * g / (alloc.noise * (1.0 + a2 * g));
}

double to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }

std::size_t SnrSurface::row_argmin(std::size_t tau_index) const
{
    std::size_t best = 0;
    for (std::size_t n = 1; n < config.subcarriers; ++n) {
        if (at(tau_index, n) < at(tau_index, best)) {
            best = n;
        }
    }
    return best;
}

bool SnrSurface::row_is_flat(std::size_t tau_index, double tolerance_db) const
{
    for (std::size_t n = 1; n < config.subcarriers; ++n) {
        if (std::abs(at(tau_index, n) - at(tau_index, 0)) > tolerance_db) {
            return false;
        }
    }
    return true;
}

namespace {

SnrSurface prepare(const SurfaceConfig& config)
{
    if (config.subcarriers == 0) {
        throw ConfigError("snr surface: N must be >= 1");
    }
    if (config.tau_points < 2) {
        throw ConfigError("snr surface: need at least two tau points");
    }
    SnrSurface s;
    s.config = config;
    // Mirror pairs are snapped so that 1 - tau is exact in both directions.
    const std::size_t last = config.tau_points - 1;
    s.taus.resize(config.tau_points);
    for (std::size_t i = 0; 2 * i <= last; ++i) {
        const double upper = 1.0 - static_cast<double>(i) / static_cast<double>(last);
        s.taus[i] = 1.0 - upper;
        s.taus[last - i] = upper;
    }
    s.gamma_db.resize(config.tau_points * config.subcarriers);
    return s;
}

} // namespace

SnrSurface snr_surface(const SurfaceConfig& config)
{
    SnrSurface s = prepare(config);
    const auto alloc = pipeline::PowerAllocation::from_db(config.p_over_n0_db, config.source_fraction,
                                                          config.relay_fraction);
    const channel::PulseShape pulse(config.beta);
    const auto n_sub = static_cast<std::ptrdiff_t>(config.subcarriers);
    const auto total = static_cast<std::ptrdiff_t>(s.gamma_db.size());

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
        const auto t = static_cast<std::size_t>(idx / n_sub);
        const auto n = static_cast<std::size_t>(idx % n_sub);
        s.gamma_db[static_cast<std::size_t>(idx)] =
            to_db(snr(n, config.subcarriers, s.taus[t], config.gains, alloc, pulse));
    }
    return s;
}

SnrSurface snr_surface_serial(const SurfaceConfig& config)
{
    SnrSurface s = prepare(config);
    const auto alloc = pipeline::PowerAllocation::from_db(config.p_over_n0_db, config.source_fraction,
                                                          config.relay_fraction);
    const channel::PulseShape pulse(config.beta);
    for (std::size_t t = 0; t < s.taus.size(); ++t) {
        for (std::size_t n = 0; n < config.subcarriers; ++n) {
            s.gamma_db[t * config.subcarriers + n] =
                to_db(snr(n, config.subcarriers, s.taus[t], config.gains, alloc, pulse));
        }
    }
    return s;
}

void write_surface_csv(std::ostream& os, const SnrSurface& surface)
{
    os << "n,tau_over_Ts,gamma_db\n";
    for (std::size_t t = 0; t < surface.taus.size(); ++t) {
        for (std::size_t n = 0; n < surface.subcarriers(); ++n) {
            os << fmt::format("{},{:.9g},{:.9g}\n", n, surface.taus[t], surface.at(t, n));
        }
    }
}

} // namespace ddstc::analysis
