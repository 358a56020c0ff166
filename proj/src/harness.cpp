#include "ddstc/harness.hpp"

#include "ddstc/baselines.hpp"
#include "ddstc/channel.hpp"
#include "ddstc/errors.hpp"
#include "ddstc/random.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace ddstc::harness {

void BerPoint::add(const StreamTally& t)
{
    payload_bits += t.bits;
    bit_errors += t.errors;
    ++streams;
    const auto e = static_cast<double>(t.errors);
    const auto b = static_cast<double>(t.bits);
    sum_err_sq += e * e;
    sum_err_bits += e * b;
    sum_bits_sq += b * b;
}

void BerPoint::finalize()
{
    if (payload_bits == 0) {
        ber = 0.0;
        ci95 = 0.0;
        return;
    }
    const auto n = static_cast<double>(payload_bits);
    ber = static_cast<double>(bit_errors) / n;
    ci95 = 1.96 * std::sqrt(ber * (1.0 - ber) / n);
}

double BerPoint::clustered_se() const
{
    if (payload_bits == 0) {
        return 0.0;
    }
    const auto total_bits = static_cast<double>(payload_bits);
    if (streams < 2) {
        return std::sqrt(ber * (1.0 - ber) / total_bits);
    }
    const double k = static_cast<double>(streams);
    const double resid = sum_err_sq - 2.0 * ber * sum_err_bits + ber * ber * sum_bits_sq;
    return std::sqrt(std::max(resid, 0.0) * k / (k - 1.0)) / total_bits;
}

double doppler_per_block(const SimConfig& cfg, Scheme scheme)
{
    if (cfg.timebase == FadingTimebase::block) {
        return cfg.doppler;
    }
    // Phase I plus Phase II duration in symbols.
    const double symbols = scheme == Scheme::proposed
                               ? static_cast<double>(2 * cfg.subcarriers + 2 * (cfg.subcarriers + cfg.cp_len))
                               : 4.0;
    return cfg.doppler * symbols;
}

std::uint64_t point_seed(std::uint64_t master, Scheme scheme, double tau, double p_over_n0_db)
{
    const auto tau_key = static_cast<std::uint64_t>(std::llround(tau * 1e9));
    const auto snr_key = static_cast<std::uint64_t>(std::llround(p_over_n0_db * 1e9));
    std::uint64_t h = mix64(master ^ (0x5ca1ab1e00000000ULL + static_cast<std::uint64_t>(scheme)));
    h = mix64(h + tau_key);
    return mix64(h + snr_key);
}

StreamTally simulate_stream(const SimConfig& cfg, Scheme scheme, double tau, const pipeline::PowerAllocation& alloc,
                            std::uint64_t stream_seed)
{
    Rng rng(stream_seed);
    const auto constellation = modem::Constellation::make(cfg.modulation);
    const channel::PulseShape pulse(cfg.beta);
    const channel::DelayProfile profile(scheme == Scheme::proposed ? cfg.delay_int : 0, tau);
    channel::FadingChannel fading(doppler_per_block(cfg, scheme), rng, cfg.oscillators);
    std::uniform_int_distribution<unsigned> pick(0, static_cast<unsigned>(constellation.size() - 1));
    const unsigned bits_per_pair = 2 * constellation.bits_per_symbol();

    StreamTally tally;
    const auto count = [&](modem::LabelPair sent, modem::LabelPair got) {
        tally.bits += bits_per_pair;
        tally.errors += modem::bit_distance(sent.first, got.first) + modem::bit_distance(sent.second, got.second);
    };

    switch (scheme) {
    case Scheme::proposed: {
        pipeline::DofdmStream stream({cfg.subcarriers, cfg.cp_len}, alloc, constellation, profile);
        stream.send_reference(fading.next_block(profile, pulse), rng);
        std::vector<modem::LabelPair> pairs(cfg.subcarriers);
        for (std::size_t b = 1; b < cfg.blocks_per_stream; ++b) {
            for (auto& p : pairs) {
                p.first = pick(rng);
                p.second = pick(rng);
            }
            const auto decided = stream.send(pairs, fading.next_block(profile, pulse), rng);
            for (std::size_t n = 0; n < pairs.size(); ++n) {
                count(pairs[n], decided[n]);
            }
        }
        break;
    }
    case Scheme::conventional: {
        baselines::ConventionalStreamState st;
        baselines::conventional_reference(st, fading.next_block(profile, pulse), alloc, rng);
        for (std::size_t b = 1; b < cfg.blocks_per_stream; ++b) {
            const modem::LabelPair sent{pick(rng), pick(rng)};
            const auto ch = fading.next_block(profile, pulse);
            count(sent, baselines::conventional_block(st, sent, constellation, ch, alloc, rng));
        }
        break;
    }
    case Scheme::coherent: {
        for (std::size_t b = 0; b < cfg.blocks_per_stream; ++b) {
            const modem::LabelPair sent{pick(rng), pick(rng)};
            const auto ch = fading.next_block(profile, pulse);
            count(sent, baselines::coherent_block(sent, constellation, ch, alloc, rng));
        }
        break;
    }
    }
    return tally;
}

namespace {

void check_point(const SimConfig& cfg, Scheme scheme, double tau, double p_over_n0_db)
{
    validate(cfg);
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw ConfigError(fmt::format("tau {} outside [0, 1]", tau));
    }
    if (!std::isfinite(p_over_n0_db)) {
        throw ConfigError("P/N0 must be finite");
    }
    if (scheme == Scheme::coherent && tau != 0.0) {
        throw ConfigError("the coherent benchmark assumes perfect synchronization (tau = 0)");
    }
    if (scheme == Scheme::proposed && cfg.cp_len <= cfg.delay_int) {
        throw ConfigError("cp must exceed delay-int");
    }
}

bool done(const SimConfig& cfg, const BerPoint& p)
{
    return (p.bit_errors >= cfg.min_errors && p.streams >= cfg.min_streams) || p.payload_bits >= cfg.max_bits;
}

BerPoint make_point(Scheme scheme, double tau, double p_over_n0_db)
{
    BerPoint p;
    p.scheme = scheme;
    p.tau = tau;
    p.p_over_n0_db = p_over_n0_db;
    return p;
}

} // namespace

BerPoint run_point(const SimConfig& cfg, Scheme scheme, double tau, double p_over_n0_db)
{
    check_point(cfg, scheme, tau, p_over_n0_db);
    const auto alloc = pipeline::PowerAllocation::from_db(p_over_n0_db, cfg.source_fraction, cfg.relay_fraction,
                                                          cfg.noiseless);
    const std::uint64_t seed = point_seed(cfg.seed, scheme, tau, p_over_n0_db);
    const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
    const auto batch = static_cast<std::ptrdiff_t>(cfg.streams_per_batch);

    BerPoint point = make_point(scheme, tau, p_over_n0_db);
    std::vector<StreamTally> tallies(cfg.streams_per_batch);
    std::uint64_t next_stream = 0;
    while (!done(cfg, point)) {
        std::exception_ptr failure;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < batch; ++i) {
            try {
                tallies[static_cast<std::size_t>(i)] =
                    simulate_stream(cfg, scheme, tau, alloc, derive_seed(seed, next_stream + static_cast<std::uint64_t>(i)));
            } catch (...) {
#pragma omp critical(ddstc_failure)
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
        for (const auto& t : tallies) {
            point.add(t);
        }
        next_stream += cfg.streams_per_batch;
    }
    point.finalize();
    return point;
}

BerPoint run_point_serial(const SimConfig& cfg, Scheme scheme, double tau, double p_over_n0_db)
{
    check_point(cfg, scheme, tau, p_over_n0_db);
    const auto alloc = pipeline::PowerAllocation::from_db(p_over_n0_db, cfg.source_fraction, cfg.relay_fraction,
                                                          cfg.noiseless);
    const std::uint64_t seed = point_seed(cfg.seed, scheme, tau, p_over_n0_db);

    BerPoint point = make_point(scheme, tau, p_over_n0_db);
    std::uint64_t stream = 0;
    while (!done(cfg, point)) {
        for (std::size_t i = 0; i < cfg.streams_per_batch; ++i, ++stream) {
            point.add(simulate_stream(cfg, scheme, tau, alloc, derive_seed(seed, stream)));
        }
    }
    point.finalize();
    return point;
}

std::vector<BerPoint> run_sweep(const SimConfig& cfg)
{
    validate(cfg);
    std::vector<BerPoint> out;
    for (auto scheme : cfg.schemes) {
        const std::vector<double> taus = scheme == Scheme::coherent ? std::vector<double>{0.0} : cfg.taus;
        for (double tau : taus) {
            for (double snr : cfg.snr_db) {
                out.push_back(run_point(cfg, scheme, tau, snr));
            }
        }
    }
    return out;
}

void write_ber_csv(std::ostream& os, std::span<const BerPoint> points)
{
    os << "scheme,tau_over_Ts,p_over_n0_db,payload_bits,bit_errors,ber,ci95\n";
    for (const auto& p : points) {
        os << fmt::format("{},{:.9g},{:.9g},{},{},{:.9g},{:.9g}\n", to_string(p.scheme), p.tau, p.p_over_n0_db,
                          p.payload_bits, p.bit_errors, p.ber, p.ci95);
    }
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::size_t line_no)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IoError(fmt::format("BER CSV line {}: bad field '{}'", line_no, s));
    }
    return v;
}

} // namespace

std::vector<BerPoint> read_ber_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("scheme,tau_over_Ts,p_over_n0_db", 0) != 0) {
        throw IoError("BER CSV: missing or unexpected header");
    }
    std::vector<BerPoint> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> f;
        std::string_view rest(line);
        while (true) {
            const auto c = rest.find(',');
            f.push_back(rest.substr(0, c));
            if (c == std::string_view::npos) break;
            rest.remove_prefix(c + 1);
        }
        if (f.size() != 7) {
            throw IoError(fmt::format("BER CSV line {}: expected 7 fields", line_no));
        }
        BerPoint p;
        try {
            p.scheme = parse_scheme(f[0]);
        } catch (const ConfigError& e) {
            throw IoError(fmt::format("BER CSV line {}: {}", line_no, e.what()));
        }
        p.tau = parse_field<double>(f[1], line_no);
        p.p_over_n0_db = parse_field<double>(f[2], line_no);
        p.payload_bits = parse_field<std::uint64_t>(f[3], line_no);
        p.bit_errors = parse_field<std::uint64_t>(f[4], line_no);
        p.ber = parse_field<double>(f[5], line_no);
        p.ci95 = parse_field<double>(f[6], line_no);
        out.push_back(p);
    }
    return out;
}

double two_proportion_z(const BerPoint& a, const BerPoint& b)
{
    const auto na = static_cast<double>(a.payload_bits);
    const auto nb = static_cast<double>(b.payload_bits);
    const double pooled = static_cast<double>(a.bit_errors + b.bit_errors) / (na + nb);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
    return se > 0.0 ? (a.ber - b.ber) / se : 0.0;
}

double two_proportion_z_clustered(const BerPoint& a, const BerPoint& b)
{
    const double se = std::hypot(a.clustered_se(), b.clustered_se());
    return se > 0.0 ? (a.ber - b.ber) / se : 0.0;
}

double snr_at_ber(std::span<const BerPoint> curve, double target_ber)
{
    std::vector<BerPoint> sorted(curve.begin(), curve.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const BerPoint& x, const BerPoint& y) { return x.p_over_n0_db < y.p_over_n0_db; });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& lo = sorted[i];
        const auto& hi = sorted[i + 1];
        if (lo.ber >= target_ber && hi.ber <= target_ber && lo.ber > 0.0 && hi.ber > 0.0) {
            const double l0 = std::log10(lo.ber);
            const double l1 = std::log10(hi.ber);
            if (l0 == l1) {
                return lo.p_over_n0_db;
            }
            const double frac = (l0 - std::log10(target_ber)) / (l0 - l1);
            return lo.p_over_n0_db + frac * (hi.p_over_n0_db - lo.p_over_n0_db);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double diversity_slope(std::span<const BerPoint> curve, double lo_db, double hi_db)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int k = 0;
    for (const auto& p : curve) {
        if (p.p_over_n0_db < lo_db || p.p_over_n0_db > hi_db || p.ber <= 0.0) {
            continue;
        }
        const double x = p.p_over_n0_db / 10.0;
        const double y = std::log10(p.ber);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    if (k < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double denom = k * sxx - sx * sx;
    return denom != 0.0 ? (k * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
}

} // namespace ddstc::harness
