#include "ddstc/baselines.hpp"

#include <cmath>
#include <limits>

namespace ddstc::baselines {

namespace {

Vec2 codeword_column(modem::LabelPair pair, const modem::Constellation& c)
{
    return modem::UstcCodeword::build(c.point(pair.first), c.point(pair.second)).apply(Vec2{1.0, 0.0});
}

/// Relay-side noisy copies r_ij = sqrt(2 P0) q_i s_j + z_ij.
struct RelaySamples {
    Complex r11, r12, r21, r22;
};

RelaySamples relay_hop(const Vec2& s, const channel::BlockChannel& ch, const pipeline::PowerAllocation& alloc,
                       Rng& rng)
{
    const double amp = alloc.source_amplitude();
    const auto noise = [&] { return alloc.noise > 0.0 ? complex_gaussian(rng, alloc.noise) : Complex{}; };
    RelaySamples r;
    r.r11 = amp * ch.q1 * s[0] + noise();
    r.r12 = amp * ch.q1 * s[1] + noise();
    r.r21 = amp * ch.q2 * s[0] + noise();
    r.r22 = amp * ch.q2 * s[1] + noise();
    return r;
}

} // namespace

Vec2 conventional_transmit(const Vec2& s, ConventionalStreamState& st, const channel::BlockChannel& ch,
                           const pipeline::PowerAllocation& alloc, Rng& rng)
{
    const auto r = relay_hop(s, ch, alloc, rng);
    const double a = alloc.gain;
    const Complex x11 = a * r.r11;
    const Complex x12 = a * r.r12;
    const Complex x21 = -a * std::conj(r.r22);
    const Complex x22 = a * std::conj(r.r21);

    Vec2 y{ch.g1 * x11 + ch.g20 * x21 + ch.g21 * st.x22_carry,
           ch.g1 * x12 + ch.g20 * x22 + ch.g21 * x21};
    if (alloc.noise > 0.0) {
        y[0] += complex_gaussian(rng, alloc.noise);
        y[1] += complex_gaussian(rng, alloc.noise);
    }
    st.x22_carry = x22;
    return y;
}

void conventional_reference(ConventionalStreamState& st, const channel::BlockChannel& ch,
                            const pipeline::PowerAllocation& alloc, Rng& rng)
{
    st.state = modem::DifferentialState::seed();
    st.y_prev = conventional_transmit(st.state.s, st, ch, alloc, rng);
    st.has_reference = true;
}

modem::LabelPair conventional_block(ConventionalStreamState& st, modem::LabelPair pair,
                                    const modem::Constellation& constellation, const channel::BlockChannel& ch,
                                    const pipeline::PowerAllocation& alloc, Rng& rng)
{
    if (!st.has_reference) {
        throw std::logic_error("conventional_block: reference block must be sent first");
    }
    const auto cw = modem::UstcCodeword::build(constellation.point(pair.first), constellation.point(pair.second));
    st.state = modem::diff_encode(st.state, cw);
    const Vec2 y = conventional_transmit(st.state.s, st, ch, alloc, rng);
    const auto decided = modem::diff_decode_joint(y, st.y_prev, constellation);
    st.y_prev = y;
    return decided;
}

CompositeChannel CompositeChannel::from(const channel::BlockChannel& ch)
{
    return {ch.q1 * ch.g1, std::conj(ch.q2) * ch.g2};
}

Vec2 coherent_transmit(modem::LabelPair pair, const modem::Constellation& constellation,
                       const channel::BlockChannel& ch, const pipeline::PowerAllocation& alloc, Rng& rng)
{
    const Vec2 s = codeword_column(pair, constellation);
    const auto r = relay_hop(s, ch, alloc, rng);
    const double a = alloc.gain;
    Vec2 y{ch.g1 * a * r.r11 - ch.g2 * a * std::conj(r.r22),
           ch.g1 * a * r.r12 + ch.g2 * a * std::conj(r.r21)};
    if (alloc.noise > 0.0) {
        y[0] += complex_gaussian(rng, alloc.noise);
        y[1] += complex_gaussian(rng, alloc.noise);
    }
    return y;
}

modem::LabelPair coherent_decode(const Vec2& y, const CompositeChannel& h, double signal_gain,
                                 const modem::Constellation& constellation)
{
    const auto& pts = constellation.points();
    if (constellation.constant_modulus()) {
        // [y1, conj(y2)] = gain * [[h1, -h2], [conj(h2), conj(h1)]] [s1, conj(s2)]
        const Complex z1 = std::conj(h.h1) * y[0] + h.h2 * std::conj(y[1]);
        const Complex z2 = std::conj(h.h1) * y[1] - h.h2 * std::conj(y[0]);
        const auto pick = [&](Complex z) {
            unsigned best = 0;
            double best_corr = -std::numeric_limits<double>::infinity();
            for (unsigned i = 0; i < pts.size(); ++i) {
                const double corr = std::real(std::conj(pts[i]) * z);
                if (corr > best_corr) {
                    best_corr = corr;
                    best = i;
                }
            }
            return best;
        };
        return {pick(z1), pick(z2)};
    }

    modem::LabelPair best;
    double best_metric = std::numeric_limits<double>::infinity();
    for (unsigned a = 0; a < pts.size(); ++a) {
        for (unsigned b = 0; b < pts.size(); ++b) {
            const Vec2 s = codeword_column({a, b}, constellation);
            const Complex p1 = signal_gain * (s[0] * h.h1 - std::conj(s[1]) * h.h2);
            const Complex p2 = signal_gain * (s[1] * h.h1 + std::conj(s[0]) * h.h2);
            const double metric = std::norm(y[0] - p1) + std::norm(y[1] - p2);
            if (metric < best_metric) {
                best_metric = metric;
                best = {a, b};
            }
        }
    }
    return best;
}

modem::LabelPair coherent_block(modem::LabelPair pair, const modem::Constellation& constellation,
                                const channel::BlockChannel& ch, const pipeline::PowerAllocation& alloc, Rng& rng)
{
    const Vec2 y = coherent_transmit(pair, constellation, ch, alloc, rng);
    return coherent_decode(y, CompositeChannel::from(ch), alloc.gain * alloc.source_amplitude(), constellation);
}

} // namespace ddstc::baselines
