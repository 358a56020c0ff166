#include "ddstc/pipeline.hpp"

#include "ddstc/errors.hpp"

#include <cmath>
#include <string>

namespace ddstc::pipeline {

PowerAllocation PowerAllocation::from_split(double total, double noise, double source_fraction,
                                            double relay_fraction)
{
    if (!(total > 0.0) || !(noise >= 0.0) || !(source_fraction > 0.0) || !(relay_fraction > 0.0)) {
        throw ConfigError("power allocation: total and fractions must be > 0, noise >= 0");
    }
    PowerAllocation a;
    a.total = total;
    a.source = source_fraction * total;
    a.relay = relay_fraction * total;
    a.noise = noise;
    a.gain = std::sqrt(a.relay / (a.source + a.noise));
    return a;
}

PowerAllocation PowerAllocation::from_db(double p_over_n0_db, double source_fraction, double relay_fraction,
                                         bool noiseless)
{
    return from_split(std::pow(10.0, p_over_n0_db / 10.0), noiseless ? 0.0 : 1.0, source_fraction,
                      relay_fraction);
}

double PowerAllocation::source_amplitude() const { return std::sqrt(2.0 * source); }

void validate(const OfdmParams& params, const channel::DelayProfile& profile)
{
    if (params.subcarriers < 1) {
        throw ConfigError("need at least one subcarrier");
    }
    if (params.cp_len < 0 || static_cast<std::size_t>(params.cp_len) > params.subcarriers) {
        throw ConfigError("cyclic prefix length must lie in [0, N]");
    }
    if (params.cp_len <= profile.d) {
        throw ConfigError("cyclic prefix length " + std::to_string(params.cp_len)
                          + " must exceed the integer delay " + std::to_string(profile.d));
    }
}

SourceFrame reference_frame(std::size_t subcarriers)
{
    SourceFrame f;
    f.states.assign(subcarriers, modem::DifferentialState::seed());
    ComplexSequence c1(subcarriers, Complex{1.0, 0.0});
    f.s1 = dsp::idft(c1);
    f.s2.assign(subcarriers, Complex{0.0, 0.0});
    return f;
}

SourceFrame source_encode(std::span<const modem::LabelPair> pairs,
                          std::span<const modem::DifferentialState> prev_states,
                          const modem::Constellation& constellation)
{
    if (pairs.size() != prev_states.size() || pairs.empty()) {
        throw std::domain_error("source_encode: need one label pair per subcarrier state");
    }
    const std::size_t n = pairs.size();
    SourceFrame f;
    f.states.resize(n);
    ComplexSequence c1(n);
    ComplexSequence c2(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto cw = modem::UstcCodeword::build(constellation.point(pairs[k].first),
                                                   constellation.point(pairs[k].second));
        f.states[k] = modem::diff_encode(prev_states[k], cw);
        c1[k] = f.states[k].s[0];
        c2[k] = f.states[k].s[1];
    }
    f.s1 = dsp::idft(c1);
    f.s2 = dsp::idft(c2);
    return f;
}

RelayReceived relay_receive(const SourceFrame& frame, const channel::BlockChannel& ch,
                            const PowerAllocation& alloc, Rng& rng)
{
    const double amp = alloc.source_amplitude();
    const auto hop = [&](Complex q, const ComplexSequence& s) {
        ComplexSequence r(s.size());
        for (std::size_t m = 0; m < s.size(); ++m) {
            r[m] = amp * q * s[m];
        }
        channel::add_awgn(r, alloc.noise, rng);
        return r;
    };
    RelayReceived out;
    out.r11 = hop(ch.q1, frame.s1);
    out.r12 = hop(ch.q1, frame.s2);
    out.r21 = hop(ch.q2, frame.s1);
    out.r22 = hop(ch.q2, frame.s2);
    return out;
}

RelayFrame relay_process(const RelayReceived& received, const PowerAllocation& alloc, int cp_len)
{
    const double a = alloc.gain;
    const auto scaled = [](const ComplexSequence& x, double k) {
        ComplexSequence y(x.size());
        for (std::size_t m = 0; m < x.size(); ++m) {
            y[m] = k * x[m];
        }
        return y;
    };
    RelayFrame f;
    f.x11 = dsp::add_cyclic_prefix(scaled(received.r11, a), cp_len);
    f.x12 = dsp::add_cyclic_prefix(scaled(received.r12, a), cp_len);
    f.x21 = dsp::add_cyclic_prefix(
        scaled(dsp::circular_time_reversal(dsp::conjugate(received.r22)), -a), cp_len);
    f.x22 = dsp::add_cyclic_prefix(
        scaled(dsp::circular_time_reversal(dsp::conjugate(received.r21)), a), cp_len);
    return f;
}

ReceivedBlock superpose_at_destination(const RelayFrame& frame, const channel::BlockChannel& ch,
                                       const channel::DelayProfile& profile, double noise_variance,
                                       Rng& rng, std::vector<Complex>& relay2_history)
{
    const std::size_t sub = frame.x11.size();
    const auto hist = static_cast<std::size_t>(profile.d) + 1;
    if (frame.x12.size() != sub || frame.x21.size() != sub || frame.x22.size() != sub) {
        throw std::domain_error("superpose_at_destination: sub-block lengths differ");
    }
    if (relay2_history.size() != hist) {
        throw std::domain_error("superpose_at_destination: relay-2 history must hold d + 1 samples");
    }
    if (2 * sub < hist) {
        throw ConfigError("superpose_at_destination: block shorter than the relay-2 delay");
    }

    // ext = history ++ x21 ++ x22, so relay-2 sample t - d lives at ext[t + 1].
    std::vector<Complex> ext;
    ext.reserve(hist + 2 * sub);
    ext.insert(ext.end(), relay2_history.begin(), relay2_history.end());
    ext.insert(ext.end(), frame.x21.begin(), frame.x21.end());
    ext.insert(ext.end(), frame.x22.begin(), frame.x22.end());

    ReceivedBlock out;
    out.y1.resize(sub);
    out.y2.resize(sub);
    for (std::size_t t = 0; t < 2 * sub; ++t) {
        const Complex r1 = t < sub ? frame.x11[t] : frame.x12[t - sub];
        const Complex v = ch.g1 * r1 + ch.g20 * ext[t + 1] + ch.g21 * ext[t];
        (t < sub ? out.y1[t] : out.y2[t - sub]) = v;
    }
    channel::add_awgn(out.y1, noise_variance, rng);
    channel::add_awgn(out.y2, noise_variance, rng);

    relay2_history.assign(ext.end() - static_cast<std::ptrdiff_t>(hist), ext.end());
    return out;
}

DestinationLink::DestinationLink(const channel::DelayProfile& profile, int cp_len)
    : profile_(profile), history_(static_cast<std::size_t>(profile.d) + 1, Complex{0.0, 0.0})
{
    if (cp_len <= profile.d) {
        throw ConfigError("cyclic prefix length must exceed the integer delay");
    }
}

ReceivedBlock DestinationLink::receive(const RelayFrame& frame, const channel::BlockChannel& ch,
                                       double noise_variance, Rng& rng)
{
    return superpose_at_destination(frame, ch, profile_, noise_variance, rng, history_);
}

std::vector<Vec2> destination_transform(const ReceivedBlock& block, int cp_len)
{
    const auto f1 = dsp::dft(dsp::remove_cyclic_prefix(block.y1, cp_len));
    const auto f2 = dsp::dft(dsp::remove_cyclic_prefix(block.y2, cp_len));
    std::vector<Vec2> obs(f1.size());
    for (std::size_t n = 0; n < f1.size(); ++n) {
        obs[n] = {f1[n], f2[n]};
    }
    return obs;
}

DecodeResult destination_decode(const ReceivedBlock& block, std::span<const Vec2> prev,
                                const modem::Constellation& constellation, int cp_len)
{
    DecodeResult r;
    r.observations = destination_transform(block, cp_len);
    if (prev.size() != r.observations.size()) {
        throw std::domain_error("destination_decode: previous observations have the wrong length");
    }
    r.pairs.resize(r.observations.size());
    for (std::size_t n = 0; n < r.observations.size(); ++n) {
        r.pairs[n] = modem::diff_decode(r.observations[n], prev[n], constellation);
    }
    return r;
}

DofdmStream::DofdmStream(const OfdmParams& params, const PowerAllocation& alloc,
                         const modem::Constellation& constellation, const channel::DelayProfile& profile)
    : params_(params), alloc_(alloc), constellation_(&constellation), link_(profile, params.cp_len)
{
    validate(params, profile);
}

ReceivedBlock DofdmStream::transmit(const SourceFrame& frame, const channel::BlockChannel& ch, Rng& rng)
{
    const auto received = relay_receive(frame, ch, alloc_, rng);
    const auto relayed = relay_process(received, alloc_, params_.cp_len);
    return link_.receive(relayed, ch, alloc_.noise, rng);
}

void DofdmStream::send_reference(const channel::BlockChannel& ch, Rng& rng)
{
    const auto frame = reference_frame(params_.subcarriers);
    states_ = frame.states;
    const auto block = transmit(frame, ch, rng);
    prev_obs_ = destination_transform(block, params_.cp_len);
}

std::vector<modem::LabelPair> DofdmStream::send(std::span<const modem::LabelPair> pairs,
                                                const channel::BlockChannel& ch, Rng& rng)
{
    if (prev_obs_.empty()) {
        throw std::logic_error("DofdmStream: send_reference must precede payload blocks");
    }
    const auto frame = source_encode(pairs, states_, *constellation_);
    states_ = frame.states;
    const auto block = transmit(frame, ch, rng);
    auto result = destination_decode(block, prev_obs_, *constellation_, params_.cp_len);
    prev_obs_ = std::move(result.observations);
    return std::move(result.pairs);
}

} // namespace ddstc::pipeline
