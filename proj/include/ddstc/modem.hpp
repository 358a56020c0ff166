// modem.hpp - constellations, unitary 2x2 space-time codewords, the
// differential chain and the non-coherent minimum-distance decoders.

#pragma once

#include "ddstc/dsp.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddstc::modem {

using dsp::Complex;
using Vec2 = std::array<Complex, 2>;

/// Raised when a decoder is asked to run outside its validity domain
/// (e.g. the decoupled decoder on a non-constant-modulus constellation).
class UnsupportedConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Modulation { bpsk, qpsk, psk8, qam16 };

Modulation parse_modulation(std::string_view name);
std::string_view to_string(Modulation m);

/// Unit average energy point set with a fixed bit labeling: the point at
/// index `label` carries the bits of `label`, most significant bit first.
class Constellation {
public:
    static Constellation make(Modulation m);

    Modulation modulation() const { return modulation_; }
    unsigned bits_per_symbol() const { return bits_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Complex>& points() const { return points_; }
    Complex point(unsigned label) const { return points_.at(label); }
    /// All points share one magnitude (PSK family).
    bool constant_modulus() const { return constant_modulus_; }

    /// Label of the nearest point; ties resolve to the lowest label.
    unsigned nearest(Complex z) const;

private:
    Constellation(Modulation m, unsigned bits, std::vector<Complex> points);

    Modulation modulation_;
    unsigned bits_;
    std::vector<Complex> points_;
    bool constant_modulus_;
};

/// Packs bits (one per byte, 0/1) into symbol labels.
std::vector<unsigned> bits_to_labels(std::span<const std::uint8_t> bits, const Constellation& c);
std::vector<std::uint8_t> labels_to_bits(std::span<const unsigned> labels, const Constellation& c);

std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c);
/// Hard-decision demapping; exact inverse of map_bits on constellation points.
std::vector<std::uint8_t> demap_bits(std::span<const Complex> symbols, const Constellation& c);

/// Number of differing bits between two labels.
unsigned bit_distance(unsigned a, unsigned b);

struct LabelPair {
    unsigned first = 0;
    unsigned second = 0;
    friend bool operator==(const LabelPair&, const LabelPair&) = default;
};

/// Normalized Alamouti-structured unitary matrix
///   1/sqrt(|v1|^2 + |v2|^2) * [[v1, -conj(v2)], [v2, conj(v1)]].
class UstcCodeword {
public:
    static UstcCodeword build(Complex v1, Complex v2);
    static UstcCodeword identity() { return build(Complex{1.0, 0.0}, Complex{0.0, 0.0}); }

    /// Row-major entry (r, c).
    Complex at(int r, int c) const { return m_[static_cast<std::size_t>(2 * r + c)]; }
    Vec2 apply(const Vec2& x) const;
    /// max |(M^H M - I)_{rc}|
    double unitarity_error() const;

private:
    std::array<Complex, 4> m_{};
};

/// Per-subcarrier (or per-stream) differential state s^(k), unit norm.
struct DifferentialState {
    Vec2 s{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    std::uint64_t block_index = 0;

    static DifferentialState seed() { return {}; }
};

/// s^(k) = V^(k) s^(k-1).
DifferentialState diff_encode(const DifferentialState& state, const UstcCodeword& cw);

/// Exhaustive argmin over all |V|^2 label pairs of ||y_now - V y_prev||.
/// Ties resolve to the lexicographically smallest (label1, label2).
LabelPair diff_decode_joint(const Vec2& y_now, const Vec2& y_prev, const Constellation& c);

/// Per-symbol decisions from the two Alamouti correlation statistics.
/// Equivalent to diff_decode_joint for constant-modulus constellations;
/// throws UnsupportedConfiguration otherwise.
LabelPair diff_decode_decoupled(const Vec2& y_now, const Vec2& y_prev, const Constellation& c);

/// Decoupled when the constellation allows it, joint otherwise.
LabelPair diff_decode(const Vec2& y_now, const Vec2& y_prev, const Constellation& c);

double norm(const Vec2& v);

} // namespace ddstc::modem
