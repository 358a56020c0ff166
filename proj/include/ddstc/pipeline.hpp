// pipeline.hpp - differential OFDM distributed space-time coding chain.
//
// Per transmission block:
//
//   source   per-subcarrier codeword V[n] and differential update
//            s[n] <- V[n] s[n]; IDFT of the two component sequences gives the
//            sub-blocks S1, S2, sent as sqrt(2 P0) S_j.
//   relays   X1j = A R1j, X21 = -A ctr(conj(R22)), X22 = A ctr(conj(R21)),
//            where ctr is the circular time-reversal; each gets a CP of L.
//   channel  relay-1 stream scaled by g1; relay-2 stream delayed by d whole
//            samples and split over taps g20 (offset d) and g21 (offset d+1).
//   dest.    CP removal, DFT, and per-subcarrier differential decoding
//            against the previous block. No channel or delay knowledge.
//
// With L > d the retained samples see a circular convolution, so subcarrier
// n obeys the Alamouti model
//
//   y[n] = A sqrt(2 P0) [[s1, -conj(s2)], [s2, conj(s1)]] [h1, H2[n]]^T + w[n]
//   H2[n] = conj(q2) (g20 + g21 e^{-j2 pi n/N}) e^{-j2 pi n d/N}.

#pragma once

#include "ddstc/channel.hpp"
#include "ddstc/dsp.hpp"
#include "ddstc/modem.hpp"
#include "ddstc/random.hpp"

#include <span>
#include <vector>

namespace ddstc::pipeline {

using dsp::Complex;
using dsp::ComplexSequence;
using modem::Vec2;

/// Powers per symbol with A = sqrt(Pr / (P0 + N0)).
struct PowerAllocation {
    double total = 0.0;  // P
    double source = 0.0; // P0
    double relay = 0.0;  // Pr
    double noise = 0.0;  // N0
    double gain = 0.0;   // A

    static PowerAllocation from_split(double total, double noise, double source_fraction = 0.5,
                                      double relay_fraction = 0.25);
    /// P = 10^(db/10) with N0 = 1, or N0 = 0 when noiseless (gain then
    /// uses the same P).
    static PowerAllocation from_db(double p_over_n0_db, double source_fraction = 0.5,
                                   double relay_fraction = 0.25, bool noiseless = false);

    double source_amplitude() const;
};

struct SourceFrame {
    std::vector<modem::DifferentialState> states; // one per subcarrier
    ComplexSequence s1;                           // IDFT{s1[n]}
    ComplexSequence s2;                           // IDFT{s2[n]}

    std::size_t size() const { return states.size(); }
};

/// Block carrying the seed states [1, 0]^T on every subcarrier.
SourceFrame reference_frame(std::size_t subcarriers);

SourceFrame source_encode(std::span<const modem::LabelPair> pairs,
                          std::span<const modem::DifferentialState> prev_states,
                          const modem::Constellation& constellation);

/// R_ij = sqrt(2 P0) q_i S_j + Z_ij.
struct RelayReceived {
    ComplexSequence r11, r12, r21, r22;
};

RelayReceived relay_receive(const SourceFrame& frame, const channel::BlockChannel& ch,
                            const PowerAllocation& alloc, Rng& rng);

/// Relay transmit sub-blocks, each of length N + L.
struct RelayFrame {
    ComplexSequence x11, x12, x21, x22;
};

RelayFrame relay_process(const RelayReceived& received, const PowerAllocation& alloc, int cp_len);

/// Destination samples for the two sub-blocks, each of length N + L.
struct ReceivedBlock {
    ComplexSequence y1, y2;
};

/// Stream-level superposition. `relay2_history` holds the last d + 1
/// samples relay 2 sent before this block (zeros at stream start); it is
/// replaced with this block's tail on return.
ReceivedBlock superpose_at_destination(const RelayFrame& frame, const channel::BlockChannel& ch,
                                       const channel::DelayProfile& profile, double noise_variance,
                                       Rng& rng, std::vector<Complex>& relay2_history);

/// Owns the relay-2 carry-over between consecutive blocks of one stream.
class DestinationLink {
public:
    DestinationLink(const channel::DelayProfile& profile, int cp_len);

    ReceivedBlock receive(const RelayFrame& frame, const channel::BlockChannel& ch, double noise_variance,
                          Rng& rng);
    const channel::DelayProfile& profile() const { return profile_; }

private:
    channel::DelayProfile profile_;
    std::vector<Complex> history_;
};

/// CP removal and DFT: per-subcarrier observations y[n] = [y1[n], y2[n]].
std::vector<Vec2> destination_transform(const ReceivedBlock& block, int cp_len);

struct DecodeResult {
    std::vector<modem::LabelPair> pairs;
    std::vector<Vec2> observations; // feed back as `prev` for the next block
};

/// Differential decoding of every subcarrier against the previous block's
/// observations. Takes no channel or delay argument by construction.
DecodeResult destination_decode(const ReceivedBlock& block, std::span<const Vec2> prev,
                                const modem::Constellation& constellation, int cp_len);

struct OfdmParams {
    std::size_t subcarriers = 64; // N
    int cp_len = 1;               // L
};

/// One sequential stream: source states, relay-2 carry-over and the
/// destination's previous observations.
class DofdmStream {
public:
    DofdmStream(const OfdmParams& params, const PowerAllocation& alloc, const modem::Constellation& constellation,
                const channel::DelayProfile& profile);

    /// Sends the differential reference; nothing is decoded.
    void send_reference(const channel::BlockChannel& ch, Rng& rng);
    /// Sends N label pairs and returns the destination's decisions.
    std::vector<modem::LabelPair> send(std::span<const modem::LabelPair> pairs, const channel::BlockChannel& ch,
                                       Rng& rng);

    const OfdmParams& params() const { return params_; }
    const std::vector<modem::DifferentialState>& states() const { return states_; }

private:
    ReceivedBlock transmit(const SourceFrame& frame, const channel::BlockChannel& ch, Rng& rng);

    OfdmParams params_;
    PowerAllocation alloc_;
    const modem::Constellation* constellation_;
    DestinationLink link_;
    std::vector<modem::DifferentialState> states_;
    std::vector<Vec2> prev_obs_;
};

/// Throws ConfigError unless L > d, N >= 1 and L <= N.
void validate(const OfdmParams& params, const channel::DelayProfile& profile);

} // namespace ddstc::pipeline
