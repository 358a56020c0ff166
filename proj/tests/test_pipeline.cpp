#include "ddstc/pipeline.hpp"

#include "ddstc/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <type_traits>

using namespace ddstc;
using namespace ddstc::pipeline;
using namespace ddstc::test;
using modem::Constellation;
using modem::LabelPair;
using modem::Modulation;

namespace {

channel::BlockChannel random_channel(Rng& rng, const channel::DelayProfile& profile, double beta = 0.9)
{
    return channel::BlockChannel::make(complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0),
                                       complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0), profile,
                                       channel::PulseShape(beta));
}

std::vector<LabelPair> random_pairs(std::size_t n, const Constellation& c, Rng& rng)
{
    std::uniform_int_distribution<unsigned> pick(0, static_cast<unsigned>(c.size() - 1));
    std::vector<LabelPair> pairs(n);
    for (auto& p : pairs) {
        p = {pick(rng), pick(rng)};
    }
    return pairs;
}

PowerAllocation unit_gain()
{
    PowerAllocation a;
    a.total = 2.0;
    a.source = 0.5;
    a.relay = 0.5;
    a.noise = 0.0;
    a.gain = 1.0;
    return a;
}

/// Per-subcarrier H2[n] built from the channel coefficients alone.
Complex expected_h2(const channel::BlockChannel& ch, const channel::DelayProfile& profile, std::size_t n,
                    std::size_t size)
{
    const double w = 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(size);
    const Complex g2n = (ch.g20 + ch.g21 * std::polar(1.0, -w)) * std::polar(1.0, -w * profile.d);
    return std::conj(ch.q2) * g2n;
}

/// Noiseless Alamouti-form observation c [[s1, -conj(s2)], [s2, conj(s1)]] [h1, H2]^T.
modem::Vec2 model_observation(const modem::Vec2& s, Complex h1, Complex h2, double scale)
{
    return {scale * (s[0] * h1 - std::conj(s[1]) * h2), scale * (s[1] * h1 + std::conj(s[0]) * h2)};
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("power allocation")
{
    const auto a = PowerAllocation::from_db(25.0);
    const double p = std::pow(10.0, 2.5);
    CHECK(a.total == doctest::Approx(p));
    CHECK(a.source == doctest::Approx(p / 2));
    CHECK(a.relay == doctest::Approx(p / 4));
    CHECK(a.noise == 1.0);
    CHECK(a.gain == doctest::Approx(std::sqrt((p / 4) / (p / 2 + 1.0))).epsilon(1e-15));
    CHECK(a.gain * a.gain == doctest::Approx(0.496855).epsilon(1e-5));
    CHECK(a.source_amplitude() == doctest::Approx(std::sqrt(p)));

    const auto quiet = PowerAllocation::from_db(25.0, 0.5, 0.25, true);
    CHECK(quiet.noise == 0.0);
    CHECK(quiet.gain == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(PowerAllocation::from_split(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(PowerAllocation::from_split(1.0, -1.0), ConfigError);
}

TEST_CASE("reference frame and Parseval")
{
    const auto ref = reference_frame(4);
    CHECK(max_abs_diff(ref.s1, ComplexSequence{2.0, 0.0, 0.0, 0.0}) < 1e-15);
    CHECK(max_abs(ref.s2) == 0.0);

    Rng rng(41);
    const auto c = Constellation::make(Modulation::qpsk);
    for (std::size_t n : {1u, 4u, 64u, 10u}) {
        const auto frame = source_encode(random_pairs(n, c, rng), reference_frame(n).states, c);
        CHECK(dsp::norm2(frame.s1) + dsp::norm2(frame.s2) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
        for (const auto& st : frame.states) {
            CHECK(modem::norm(st.s) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(st.block_index == 1);
        }
    }
}

TEST_CASE("one subcarrier reduces to the plain differential chain")
{
    Rng rng(42);
    const auto c = Constellation::make(Modulation::qpsk);
    modem::DifferentialState chain;
    std::vector<modem::DifferentialState> states{chain};
    for (int k = 0; k < 10; ++k) {
        const auto pairs = random_pairs(1, c, rng);
        const auto frame = source_encode(pairs, states, c);
        chain = modem::diff_encode(chain, modem::UstcCodeword::build(c.point(pairs[0].first), c.point(pairs[0].second)));
        CHECK(std::abs(frame.s1[0] - chain.s[0]) < 1e-15);
        CHECK(std::abs(frame.s2[0] - chain.s[1]) < 1e-15);
        states = frame.states;
    }
    CHECK_THROWS_AS(source_encode(random_pairs(2, c, rng), states, c), std::domain_error);
}

TEST_CASE("relay configuration")
{
    const auto a = unit_gain();
    RelayReceived r;
    r.r11 = {1.0, 2.0, 3.0, 4.0};
    r.r12 = {0.0, 1.0, 0.0, 0.0};
    r.r21 = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    r.r22 = {1.0, 0.0, 0.0, 0.0};
    const auto f = relay_process(r, a, 1);
    CHECK(dsp::remove_cyclic_prefix(f.x21, 1) == ComplexSequence{-1.0, 0.0, 0.0, 0.0});
    CHECK(dsp::remove_cyclic_prefix(f.x11, 1) == r.r11);
    // X22 = ctr(conj(R21)) = [-1j, -4j, -3j, -2j]
    CHECK(max_abs_diff(dsp::remove_cyclic_prefix(f.x22, 1), ComplexSequence{{0, -1}, {0, -4}, {0, -3}, {0, -2}})
          < 1e-15);
    for (const auto* x : {&f.x11, &f.x12, &f.x21, &f.x22}) {
        REQUIRE(x->size() == 5);
        CHECK((*x)[0] == (*x)[4]);
    }

    Rng rng(43);
    const auto big = relay_process({random_sequence(8, rng), random_sequence(8, rng), random_sequence(8, rng),
                                    random_sequence(8, rng)},
                                   a, 3);
    for (const auto* x : {&big.x11, &big.x12, &big.x21, &big.x22}) {
        for (int i = 0; i < 3; ++i) {
            CHECK((*x)[static_cast<std::size_t>(i)] == (*x)[static_cast<std::size_t>(8 + i)]);
        }
    }
}

TEST_CASE("relay transmit power equals Pr on average")
{
    // E|R|^2 per sample is 2 P0 |q|^2 E|S|^2 + N0 with E|S|^2 = 1/2 for
    // random unit-norm states, so the average relay power is A^2 (P0 + N0).
    Rng rng(44);
    const auto c = Constellation::make(Modulation::bpsk);
    const auto alloc = PowerAllocation::from_db(10.0);
    const std::size_t n = 16;
    const int cp = 1;
    double relay1 = 0.0, relay2 = 0.0;
    double fixed_q = 0.0;
    const int blocks = 20000;
    const channel::DelayProfile profile;
    auto fixed = random_channel(rng, profile);
    for (int b = 0; b < blocks; ++b) {
        const auto frame = source_encode(random_pairs(n, c, rng), reference_frame(n).states, c);
        const auto ch = random_channel(rng, profile);
        const auto f = relay_process(relay_receive(frame, ch, alloc, rng), alloc, cp);
        relay1 += (dsp::norm2(f.x11) + dsp::norm2(f.x12)) / (2.0 * (n + cp));
        relay2 += (dsp::norm2(f.x21) + dsp::norm2(f.x22)) / (2.0 * (n + cp));
        const auto g = relay_process(relay_receive(frame, fixed, alloc, rng), alloc, cp);
        fixed_q += (dsp::norm2(g.x11) + dsp::norm2(g.x12)) / (2.0 * (n + cp));
    }
    CHECK(relay1 / blocks == doctest::Approx(alloc.relay).epsilon(0.02));
    CHECK(relay2 / blocks == doctest::Approx(alloc.relay).epsilon(0.02));
    const double a2 = alloc.gain * alloc.gain;
    CHECK(fixed_q / blocks
          == doctest::Approx(a2 * (alloc.source * std::norm(fixed.q1) + alloc.noise)).epsilon(0.02));
}

TEST_CASE("synchronized superposition is a sample-wise sum")
{
    Rng rng(45);
    const channel::DelayProfile profile(0, 0.0);
    const auto ch = random_channel(rng, profile);
    RelayFrame f{random_sequence(9, rng), random_sequence(9, rng), random_sequence(9, rng), random_sequence(9, rng)};
    std::vector<Complex> history(1, Complex{5.0, 5.0});
    const auto y = superpose_at_destination(f, ch, profile, 0.0, rng, history);
    for (std::size_t t = 0; t < 9; ++t) {
        CHECK(std::abs(y.y1[t] - (ch.g1 * f.x11[t] + ch.g2 * f.x21[t])) < 1e-14);
        CHECK(std::abs(y.y2[t] - (ch.g1 * f.x12[t] + ch.g2 * f.x22[t])) < 1e-14);
    }
    REQUIRE(history.size() == 1);
    CHECK(history[0] == f.x22.back());
}

TEST_CASE("a full-symbol delay shifts relay 2 by one sample")
{
    Rng rng(46);
    const channel::DelayProfile profile(0, 1.0);
    const auto ch = random_channel(rng, profile);
    RelayFrame f{random_sequence(6, rng), random_sequence(6, rng), random_sequence(6, rng), random_sequence(6, rng)};
    const Complex carried{0.25, -0.5};
    std::vector<Complex> history{carried};
    const auto y = superpose_at_destination(f, ch, profile, 0.0, rng, history);
    CHECK(std::abs(y.y1[0] - (ch.g1 * f.x11[0] + ch.g2 * carried)) < 1e-14);
    for (std::size_t t = 1; t < 6; ++t) {
        CHECK(std::abs(y.y1[t] - (ch.g1 * f.x11[t] + ch.g2 * f.x21[t - 1])) < 1e-14);
    }
    CHECK(std::abs(y.y2[0] - (ch.g1 * f.x12[0] + ch.g2 * f.x21[5])) < 1e-14);
}

TEST_CASE("superposition with a cyclic prefix is a circular convolution")
{
    Rng rng(47);
    for (int d : {0, 1, 2}) {
        const int cp = d + 1;
        for (double tau : {0.0, 0.3, 0.5, 0.85, 1.0}) {
            const std::size_t n = 16;
            const channel::DelayProfile profile(d, tau);
            const auto ch = random_channel(rng, profile);
            RelayFrame f;
            const auto raw = std::array{random_sequence(n, rng), random_sequence(n, rng), random_sequence(n, rng),
                                        random_sequence(n, rng)};
            f.x11 = dsp::add_cyclic_prefix(raw[0], cp);
            f.x12 = dsp::add_cyclic_prefix(raw[1], cp);
            f.x21 = dsp::add_cyclic_prefix(raw[2], cp);
            f.x22 = dsp::add_cyclic_prefix(raw[3], cp);
            std::vector<Complex> history(static_cast<std::size_t>(d) + 1);
            for (auto& h : history) {
                h = complex_gaussian(rng, 1.0);
            }
            const auto y = superpose_at_destination(f, ch, profile, 0.0, rng, history);

            ComplexSequence taps(n);
            taps[static_cast<std::size_t>(d)] += ch.g20;
            taps[static_cast<std::size_t>(d + 1) % n] += ch.g21;
            const auto c1 = dsp::circular_convolve(taps, raw[2]);
            const auto c2 = dsp::circular_convolve(taps, raw[3]);
            const auto y1 = dsp::remove_cyclic_prefix(y.y1, cp);
            const auto y2 = dsp::remove_cyclic_prefix(y.y2, cp);
            for (std::size_t m = 0; m < n; ++m) {
                CHECK(std::abs(y1[m] - (ch.g1 * raw[0][m] + c1[m])) < 1e-12);
                CHECK(std::abs(y2[m] - (ch.g1 * raw[1][m] + c2[m])) < 1e-12);
            }
        }
    }
}

TEST_CASE("per-subcarrier observations follow the Alamouti model with the reconstructed H2[n]")
{
    Rng rng(48);
    const auto c = Constellation::make(Modulation::qpsk);
    const auto alloc = PowerAllocation::from_db(20.0, 0.5, 0.25, true);
    const double scale = alloc.gain * alloc.source_amplitude();
    for (int d : {0, 1, 2}) {
        for (double tau : {0.0, 0.25, 0.5, 0.7, 1.0}) {
            for (std::size_t n : {4u, 12u, 64u}) {
                const channel::DelayProfile profile(d, tau);
                const auto ch = random_channel(rng, profile);
                const auto frame = source_encode(random_pairs(n, c, rng), reference_frame(n).states, c);
                const auto relayed = relay_process(relay_receive(frame, ch, alloc, rng), alloc, d + 1);
                std::vector<Complex> history(static_cast<std::size_t>(d) + 1, Complex{1.0, 1.0});
                const auto block = superpose_at_destination(relayed, ch, profile, 0.0, rng, history);
                const auto obs = destination_transform(block, d + 1);
                double worst = 0.0;
                double ref = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const auto want = model_observation(frame.states[k].s, ch.q1 * ch.g1,
                                                        expected_h2(ch, profile, k, n), scale);
                    worst = std::max({worst, std::abs(obs[k][0] - want[0]), std::abs(obs[k][1] - want[1])});
                    ref = std::max({ref, std::abs(want[0]), std::abs(want[1])});
                }
                CHECK(worst < 1e-9 * std::max(ref, 1.0));
            }
        }
    }
}

TEST_CASE("zero noise: every payload symbol is recovered for any delay with L > d")
{
    Rng rng(49);
    const auto alloc = PowerAllocation::from_db(20.0, 0.5, 0.25, true);
    for (auto m : {Modulation::bpsk, Modulation::qpsk}) {
        const auto c = Constellation::make(m);
        for (int d : {0, 1, 2}) {
            for (int ti = 0; ti <= 10; ++ti) {
                const double tau = ti / 10.0;
                for (std::size_t n : {4u, 16u, 64u}) {
                    const channel::DelayProfile profile(d, tau);
                    const auto ch = random_channel(rng, profile);
                    DofdmStream stream({n, d + 1}, alloc, c, profile);
                    stream.send_reference(ch, rng);
                    std::size_t errors = 0;
                    for (int b = 0; b < 10; ++b) {
                        const auto pairs = random_pairs(n, c, rng);
                        const auto got = stream.send(pairs, ch, rng);
                        for (std::size_t k = 0; k < n; ++k) {
                            errors += got[k] == pairs[k] ? 0 : 1;
                        }
                    }
                    CHECK_MESSAGE(errors == 0, "d=" << d << " tau=" << tau << " N=" << n);
                }
            }
        }
    }
}

TEST_CASE("the decoder takes no channel or delay argument")
{
    static_assert(std::is_invocable_r_v<DecodeResult, decltype(&destination_decode), const ReceivedBlock&,
                                        std::span<const modem::Vec2>, const Constellation&, int>);
    Rng rng(50);
    const auto c = Constellation::make(Modulation::bpsk);
    const ReceivedBlock block{random_sequence(5, rng), random_sequence(5, rng)};
    const std::vector<modem::Vec2> prev(3);
    CHECK_THROWS_AS(destination_decode(block, prev, c, 1), std::domain_error);
}

TEST_CASE("configuration errors")
{
    const auto c = Constellation::make(Modulation::bpsk);
    const auto alloc = PowerAllocation::from_db(10.0);
    CHECK_THROWS_AS(DofdmStream({8, 1}, alloc, c, channel::DelayProfile(1, 0.0)), ConfigError);
    CHECK_THROWS_AS(DofdmStream({8, 2}, alloc, c, channel::DelayProfile(2, 0.5)), ConfigError);
    CHECK_THROWS_AS(validate({0, 1}, channel::DelayProfile(0, 0.0)), ConfigError);
    CHECK_THROWS_AS(validate({4, 5}, channel::DelayProfile(0, 0.0)), ConfigError);
    CHECK_NOTHROW(validate({4, 3}, channel::DelayProfile(2, 0.0)));

    DofdmStream stream({4, 1}, alloc, c, channel::DelayProfile(0, 0.0));
    Rng rng(51);
    const std::vector<LabelPair> pairs(4);
    CHECK_THROWS_AS(stream.send(pairs, channel::BlockChannel{}, rng), std::logic_error);
}

TEST_CASE("measured equivalent noise variance matches the closed form")
{
    Rng rng(52);
    const std::size_t n = 16;
    const int cp = 1;
    const auto alloc = PowerAllocation::from_db(15.0);
    const double scale = alloc.gain * alloc.source_amplitude();
    const auto c = Constellation::make(Modulation::bpsk);
    for (double tau : {0.0, 0.3, 0.5}) {
        const channel::DelayProfile profile(0, tau);
        const auto ch = channel::BlockChannel::make({0.8, -0.3}, {-0.2, 1.1}, {0.6, 0.7}, {1.2, 0.1}, profile,
                                                    channel::PulseShape(0.9));
        std::vector<double> acc(n);
        const int blocks = 20000;
        std::vector<Complex> history(1);
        for (int b = 0; b < blocks; ++b) {
            const auto frame = source_encode(random_pairs(n, c, rng), reference_frame(n).states, c);
            const auto relayed = relay_process(relay_receive(frame, ch, alloc, rng), alloc, cp);
            const auto obs = destination_transform(superpose_at_destination(relayed, ch, profile, alloc.noise, rng,
                                                                            history),
                                                   cp);
            for (std::size_t k = 0; k < n; ++k) {
                const auto clean = model_observation(frame.states[k].s, ch.q1 * ch.g1, expected_h2(ch, profile, k, n),
                                                     scale);
                acc[k] += std::norm(obs[k][0] - clean[0]) + std::norm(obs[k][1] - clean[1]);
            }
        }
        double ratio_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double pulse_c = std::norm(channel::raised_cosine(tau, 0.9)
                                             + channel::raised_cosine(1.0 - tau, 0.9)
                                                   * std::polar(1.0, -2.0 * std::numbers::pi * k / n));
            const double sigma2 = alloc.noise
                                  * (1.0 + alloc.gain * alloc.gain * (std::norm(ch.g1) + std::norm(ch.g2) * pulse_c));
            const double measured = acc[k] / (2.0 * blocks);
            CHECK(measured == doctest::Approx(sigma2).epsilon(0.05));
            ratio_sum += measured / sigma2;
        }
        CHECK(ratio_sum / n == doctest::Approx(1.0).epsilon(0.01));
    }
}

}
