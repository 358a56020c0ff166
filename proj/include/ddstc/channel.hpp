// channel.hpp - raised-cosine pulse, fractional-delay taps, Jakes-correlated
// Rayleigh block fading and AWGN.

#pragma once

#include "ddstc/dsp.hpp"
#include "ddstc/random.hpp"

#include <array>
#include <span>
#include <vector>

namespace ddstc::channel {

using dsp::Complex;
using dsp::ComplexSequence;

/// p(t) = sinc(t) cos(pi beta t) / (1 - 4 beta^2 t^2), t in units of Ts.
/// Exactly 1 at t = 0 and exactly 0 at nonzero integers. Inside
/// |1 - 4 beta^2 t^2| < 1e-9 the analytic limit (pi/4) sinc(1/(2 beta)) is
/// returned.
double raised_cosine(double t, double beta);

struct PulseShape {
    double beta = 0.9;

    explicit PulseShape(double roll_off = 0.9);
    double operator()(double t) const { return raised_cosine(t, beta); }
};

/// Relay-2 arrival offset (d Ts + tau) relative to relay 1; Ts = 1.
struct DelayProfile {
    int d = 0;
    double tau = 0.0;

    DelayProfile() = default;
    DelayProfile(int whole, double fractional);
};

struct FractionalTaps {
    Complex g20;
    Complex g21;
};

/// (p(tau) g2, p(Ts - tau) g2).
FractionalTaps fractional_taps(const DelayProfile& profile, const PulseShape& pulse, Complex g2);

/// One transmission block's coefficients plus the derived relay-2 taps.
struct BlockChannel {
    Complex q1{1.0, 0.0};
    Complex q2{1.0, 0.0};
    Complex g1{1.0, 0.0};
    Complex g2{1.0, 0.0};
    Complex g20{1.0, 0.0};
    Complex g21{0.0, 0.0};

    static BlockChannel make(Complex q1, Complex q2, Complex g1, Complex g2,
                             const DelayProfile& profile, const PulseShape& pulse);
};

/// Sum-of-sinusoids Rayleigh process with randomized phases
/// (Zheng-Xiao construction). Unit average power; the ensemble
/// autocorrelation at lag k steps approaches J0(2 pi fd k), where fd is
/// the Doppler frequency normalized to the step interval.
class JakesProcess {
public:
    static constexpr int default_oscillators = 32;

    JakesProcess(double doppler_per_step, Rng& rng, int oscillators = default_oscillators);

    /// Value at the current step, then advance one step.
    Complex next();
    /// Value at an arbitrary (fractional) step index.
    Complex at(double step) const;
    double doppler_per_step() const { return doppler_; }

private:
    double doppler_;
    std::vector<double> freq_re_;  // 2 pi fd cos(alpha_n)
    std::vector<double> freq_im_;  // 2 pi fd sin(alpha_n)
    std::vector<double> phase_re_;
    std::vector<double> phase_im_;
    double amplitude_;
    std::uint64_t step_ = 0;
};

/// Four independent Jakes processes for q1, q2, g1, g2.
class FadingChannel {
public:
    FadingChannel(double doppler_per_block, Rng& rng, int oscillators = JakesProcess::default_oscillators);

    /// One draw per process plus the derived taps.
    BlockChannel next_block(const DelayProfile& profile, const PulseShape& pulse);

private:
    std::array<JakesProcess, 4> links_;
};

/// Adds CN(0, variance) samples in place; variance 0 leaves data untouched.
void add_awgn(std::span<Complex> data, double variance, Rng& rng);

ComplexSequence awgn(std::span<const Complex> seq, double variance, Rng& rng);

} // namespace ddstc::channel
