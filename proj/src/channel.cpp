#include "ddstc/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddstc::channel {

namespace {

double sinc(double x)
{
    if (x == 0.0) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

constexpr double singular_window = 1e-9;

} // namespace

double raised_cosine(double t, double beta)
{
    if (t == 0.0) {
        return 1.0;
    }
    if (std::nearbyint(t) == t) {
        return 0.0;
    }
    // (1 - 2 beta t)(1 + 2 beta t) avoids cancellation near the singular point.
    const double denom = (1.0 - 2.0 * beta * t) * (1.0 + 2.0 * beta * t);
    if (beta > 0.0 && std::abs(denom) < singular_window) {
        return std::numbers::pi / 4.0 * sinc(1.0 / (2.0 * beta));
    }
    return sinc(t) * std::cos(std::numbers::pi * beta * t) / denom;
}

PulseShape::PulseShape(double roll_off) : beta(roll_off)
{
    if (!(roll_off >= 0.0 && roll_off <= 1.0)) {
        throw std::domain_error("PulseShape: roll-off must lie in [0, 1]");
    }
}

DelayProfile::DelayProfile(int whole, double fractional) : d(whole), tau(fractional)
{
    if (whole < 0) {
        throw std::domain_error("DelayProfile: integer delay must be >= 0");
    }
    if (!(fractional >= 0.0 && fractional <= 1.0)) {
        throw std::domain_error("DelayProfile: tau must lie in [0, Ts]");
    }
}

FractionalTaps fractional_taps(const DelayProfile& profile, const PulseShape& pulse, Complex g2)
{
    return {pulse(profile.tau) * g2, pulse(1.0 - profile.tau) * g2};
}

BlockChannel BlockChannel::make(Complex q1, Complex q2, Complex g1, Complex g2,
                                const DelayProfile& profile, const PulseShape& pulse)
{
    const auto taps = fractional_taps(profile, pulse, g2);
    return {q1, q2, g1, g2, taps.g20, taps.g21};
}

JakesProcess::JakesProcess(double doppler_per_step, Rng& rng, int oscillators)
    : doppler_(doppler_per_step)
{
    if (oscillators < 1) {
        throw std::domain_error("JakesProcess: need at least one oscillator");
    }
    if (!(doppler_per_step >= 0.0) || !std::isfinite(doppler_per_step)) {
        throw std::domain_error("JakesProcess: Doppler must be finite and >= 0");
    }
    std::uniform_real_distribution<double> uphase(-std::numbers::pi, std::numbers::pi);
    const double theta = uphase(rng);
    const auto m = static_cast<std::size_t>(oscillators);
    freq_re_.resize(m);
    freq_im_.resize(m);
    phase_re_.resize(m);
    phase_im_.resize(m);
    const double w = 2.0 * std::numbers::pi * doppler_per_step;
    for (std::size_t n = 0; n < m; ++n) {
        const double alpha = (2.0 * std::numbers::pi * static_cast<double>(n + 1) - std::numbers::pi + theta)
                             / (4.0 * static_cast<double>(m));
        freq_re_[n] = w * std::cos(alpha);
        freq_im_[n] = w * std::sin(alpha);
        phase_re_[n] = uphase(rng);
        phase_im_[n] = uphase(rng);
    }
    // Each quadrature carries half the power.
    amplitude_ = std::sqrt(1.0 / static_cast<double>(m));
}

Complex JakesProcess::at(double step) const
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t n = 0; n < freq_re_.size(); ++n) {
        re += std::cos(freq_re_[n] * step + phase_re_[n]);
        im += std::cos(freq_im_[n] * step + phase_im_[n]);
    }
    return {amplitude_ * re, amplitude_ * im};
}

Complex JakesProcess::next()
{
    const Complex v = at(static_cast<double>(step_));
    ++step_;
    return v;
}

FadingChannel::FadingChannel(double doppler_per_block, Rng& rng, int oscillators)
    : links_{JakesProcess(doppler_per_block, rng, oscillators), JakesProcess(doppler_per_block, rng, oscillators),
             JakesProcess(doppler_per_block, rng, oscillators), JakesProcess(doppler_per_block, rng, oscillators)}
{
}

BlockChannel FadingChannel::next_block(const DelayProfile& profile, const PulseShape& pulse)
{
    const Complex q1 = links_[0].next();
    const Complex q2 = links_[1].next();
    const Complex g1 = links_[2].next();
    const Complex g2 = links_[3].next();
    return BlockChannel::make(q1, q2, g1, g2, profile, pulse);
}

void add_awgn(std::span<Complex> data, double variance, Rng& rng)
{
    if (variance < 0.0) {
        throw std::domain_error("awgn: variance must be >= 0");
    }
    if (variance == 0.0) {
        return;
    }
    for (auto& x : data) {
        x += complex_gaussian(rng, variance);
    }
}

ComplexSequence awgn(std::span<const Complex> seq, double variance, Rng& rng)
{
    ComplexSequence out(seq.begin(), seq.end());
    add_awgn(out, variance, rng);
    return out;
}

} // namespace ddstc::channel
