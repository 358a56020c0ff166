// baselines.hpp - reference schemes for comparison with the OFDM chain.
//
// Conventional differential DSTC: two-symbol blocks, relay-2 arriving tau
// late so that its previous-block x22 leaks into y1:
//
//   y1 = g1 x11 + g20 x21 + g21 x22^(k-1) + n1
//   y2 = g1 x12 + g20 x22 + g21 x21       + n2
//
// decoded with the exhaustive differential rule, ISI treated as noise.
//
// Coherent DSTC: the same relay structure with perfect synchronization and
// the composite channels h1 = q1 g1, h2 = conj(q2) g2 handed to an ML
// (Alamouti-combining) decoder.

#pragma once

#include "ddstc/channel.hpp"
#include "ddstc/modem.hpp"
#include "ddstc/pipeline.hpp"
#include "ddstc/random.hpp"

namespace ddstc::baselines {

using dsp::Complex;
using modem::Vec2;

struct ConventionalStreamState {
    modem::DifferentialState state;
    Vec2 y_prev{};
    /// Relay 2's previous-block x22 (zero before the first block).
    Complex x22_carry{0.0, 0.0};
    bool has_reference = false;
};

/// Phase I + Phase II for one two-symbol block carrying s; updates the
/// relay-2 carry-over and returns the destination samples.
Vec2 conventional_transmit(const Vec2& s, ConventionalStreamState& st, const channel::BlockChannel& ch,
                           const pipeline::PowerAllocation& alloc, Rng& rng);

/// Sends the seed state s^(0) = [1, 0]^T; nothing is decoded.
void conventional_reference(ConventionalStreamState& st, const channel::BlockChannel& ch,
                            const pipeline::PowerAllocation& alloc, Rng& rng);

/// Encodes `pair`, transmits and decodes it against the previous block.
modem::LabelPair conventional_block(ConventionalStreamState& st, modem::LabelPair pair,
                                    const modem::Constellation& constellation, const channel::BlockChannel& ch,
                                    const pipeline::PowerAllocation& alloc, Rng& rng);

struct CompositeChannel {
    Complex h1;
    Complex h2;

    static CompositeChannel from(const channel::BlockChannel& ch);
};

/// y = gain * [[s1, -conj(s2)], [s2, conj(s1)]] [h1, h2]^T + w with s the
/// first column of the codeword; perfect synchronization.
Vec2 coherent_transmit(modem::LabelPair pair, const modem::Constellation& constellation,
                       const channel::BlockChannel& ch, const pipeline::PowerAllocation& alloc, Rng& rng);

/// ML decision given the composite channels and the end-to-end signal gain
/// A sqrt(2 P0). Alamouti combining for constant-modulus sets, exhaustive
/// search otherwise.
modem::LabelPair coherent_decode(const Vec2& y, const CompositeChannel& h, double signal_gain,
                                 const modem::Constellation& constellation);

modem::LabelPair coherent_block(modem::LabelPair pair, const modem::Constellation& constellation,
                                const channel::BlockChannel& ch, const pipeline::PowerAllocation& alloc, Rng& rng);

} // namespace ddstc::baselines
