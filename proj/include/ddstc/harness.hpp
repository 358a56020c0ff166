// harness.hpp - Monte Carlo BER engine.
//
// A point (scheme, tau, P/N0) is estimated from independent streams. Each
// stream owns its generator, seeded by derive_seed(point seed, stream index),
// and runs `blocks_per_stream` consecutive Jakes-correlated blocks (the
// first one is the differential reference for the differential schemes).
// Streams are processed in fixed-size batches and the stop rule is checked
// only between batches, so results do not depend on the worker count.

#pragma once

#include "ddstc/config.hpp"
#include "ddstc/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace ddstc::harness {

struct StreamTally {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
};

struct BerPoint {
    Scheme scheme = Scheme::proposed;
    double tau = 0.0;
    double p_over_n0_db = 0.0;
    std::uint64_t payload_bits = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double ci95 = 0.0; // binomial normal-approximation half-width

    // Per-stream moments for the cluster-robust standard error. Not part of
    // the CSV schema.
    std::uint64_t streams = 0;
    double sum_err_sq = 0.0;
    double sum_err_bits = 0.0;
    double sum_bits_sq = 0.0;

    void add(const StreamTally& t);
    void finalize();
    /// Standard error of `ber` treating each stream as one cluster. Falls
    /// back to the binomial value when fewer than two streams exist.
    double clustered_se() const;
};

/// Simulates one independent stream and counts payload bit errors.
StreamTally simulate_stream(const SimConfig& cfg, Scheme scheme, double tau, const pipeline::PowerAllocation& alloc,
                            std::uint64_t stream_seed);

/// Seed shared by all streams of one operating point.
std::uint64_t point_seed(std::uint64_t master, Scheme scheme, double tau, double p_over_n0_db);

/// Normalized Doppler per block step for `scheme` under cfg.timebase.
double doppler_per_block(const SimConfig& cfg, Scheme scheme);

/// Streams run on an OpenMP team of cfg.workers threads (0 = runtime default).
BerPoint run_point(const SimConfig& cfg, Scheme scheme, double tau, double p_over_n0_db);
/// Single-threaded reference of run_point; identical output.
BerPoint run_point_serial(const SimConfig& cfg, Scheme scheme, double tau, double p_over_n0_db);

/// schemes x taus x snr grid. The coherent benchmark runs at tau = 0 only.
std::vector<BerPoint> run_sweep(const SimConfig& cfg);

/// Header `scheme,tau_over_Ts,p_over_n0_db,payload_bits,bit_errors,ber,ci95`.
void write_ber_csv(std::ostream& os, std::span<const BerPoint> points);
std::vector<BerPoint> read_ber_csv(std::istream& is);

/// Pooled two-proportion z statistic (independent Bernoulli bits).
double two_proportion_z(const BerPoint& a, const BerPoint& b);
/// Two-sample z statistic using the cluster-robust standard errors.
double two_proportion_z_clustered(const BerPoint& a, const BerPoint& b);

/// P/N0 (dB) where the curve crosses `target_ber`, by linear interpolation
/// of log10(BER) between adjacent grid points. NaN if never bracketed.
double snr_at_ber(std::span<const BerPoint> curve, double target_ber);

/// Least-squares slope of log10(BER) versus P/N0[dB]/10 over points with
/// lo_db <= P/N0 <= hi_db and nonzero BER.
double diversity_slope(std::span<const BerPoint> curve, double lo_db, double hi_db);

} // namespace ddstc::harness
