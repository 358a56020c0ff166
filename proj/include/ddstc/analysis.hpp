// analysis.hpp - closed-form per-subcarrier noise variance and SNR.
//
//   c[n]       = |p(tau) + p(Ts - tau) e^{-j 2 pi n / N}|^2
//   sigma^2[n] = N0 (1 + A^2 (|g1|^2 + |g2|^2 c[n]))
//   gamma[n]   = A^2 P0 (|g1|^2 + |g2|^2 c[n]) / sigma^2[n]
//
// At tau = 0 (or Ts) c[n] = 1 and these reduce to the synchronized values.

#pragma once

#include "ddstc/channel.hpp"
#include "ddstc/pipeline.hpp"

#include <cstddef>
#include <ostream>
#include <vector>

namespace ddstc::analysis {

/// |g1|^2 and |g2|^2 for a given channel realization.
struct LinkGains {
    double g1_power = 1.0;
    double g2_power = 1.0;

    static LinkGains from(const channel::BlockChannel& ch);
};

double tap_power_c(std::size_t n, std::size_t subcarriers, double tau, const channel::PulseShape& pulse);

double noise_variance(std::size_t n, std::size_t subcarriers, double tau, const LinkGains& gains,
                      const pipeline::PowerAllocation& alloc, const channel::PulseShape& pulse);

/// Linear per-symbol SNR.
double snr(std::size_t n, std::size_t subcarriers, double tau, const LinkGains& gains,
           const pipeline::PowerAllocation& alloc, const channel::PulseShape& pulse);

double to_db(double power_ratio);

struct SurfaceConfig {
    std::size_t subcarriers = 64;
    int cp_len = 1;
    double p_over_n0_db = 25.0;
    double source_fraction = 0.5;
    double relay_fraction = 0.25;
    LinkGains gains{};
    double beta = 0.9;
    /// Uniform tau grid over [0, Ts] with this many points (>= 2).
    std::size_t tau_points = 101;
};

struct SnrSurface {
    SurfaceConfig config;
    std::vector<double> taus;
    std::vector<double> gamma_db; // row-major [tau][n]

    std::size_t subcarriers() const { return config.subcarriers; }
    double at(std::size_t tau_index, std::size_t n) const { return gamma_db[tau_index * config.subcarriers + n]; }
    /// Smallest n attaining the row minimum.
    std::size_t row_argmin(std::size_t tau_index) const;
    bool row_is_flat(std::size_t tau_index, double tolerance_db = 1e-12) const;
};

/// Grid evaluation, parallel over grid points.
SnrSurface snr_surface(const SurfaceConfig& config);
/// Single-threaded reference used to check snr_surface.
SnrSurface snr_surface_serial(const SurfaceConfig& config);

/// Header `n,tau_over_Ts,gamma_db`, rows ordered by tau then n, values
/// with 9 significant digits.
void write_surface_csv(std::ostream& os, const SnrSurface& surface);

} // namespace ddstc::analysis
