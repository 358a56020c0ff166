#include "ddstc/modem.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace ddstc::modem {

namespace {

unsigned gray(unsigned k) { return k ^ (k >> 1); }

std::vector<Complex> psk_points(unsigned order, double offset)
{
    std::vector<Complex> pts(order);
    for (unsigned k = 0; k < order; ++k) {
        const double phase = offset + 2.0 * std::numbers::pi * k / order;
        pts[gray(k)] = std::polar(1.0, phase);
    }
    return pts;
}

std::vector<Complex> qam16_points()
{
    // Per-axis Gray map 00->-3, 01->-1, 11->+1, 10->+3.
    constexpr std::array<double, 4> axis{-3.0, -1.0, 3.0, 1.0};
    const double scale = 1.0 / std::sqrt(10.0);
    std::vector<Complex> pts(16);
    for (unsigned label = 0; label < 16; ++label) {
        pts[label] = Complex(axis[label >> 2], axis[label & 3u]) * scale;
    }
    return pts;
}

} // namespace

Modulation parse_modulation(std::string_view name)
{
    if (name == "bpsk") return Modulation::bpsk;
    if (name == "qpsk") return Modulation::qpsk;
    if (name == "8psk") return Modulation::psk8;
    if (name == "16qam") return Modulation::qam16;
    throw std::invalid_argument("unknown constellation '" + std::string(name) + "'");
}

std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::bpsk: return "bpsk";
    case Modulation::qpsk: return "qpsk";
    case Modulation::psk8: return "8psk";
    case Modulation::qam16: return "16qam";
    }
    return "?";
}

Constellation::Constellation(Modulation m, unsigned bits, std::vector<Complex> points)
    : modulation_(m), bits_(bits), points_(std::move(points)), constant_modulus_(true)
{
    const double r0 = std::abs(points_.front());
    for (const auto& p : points_) {
        if (std::abs(std::abs(p) - r0) > 1e-12) {
            constant_modulus_ = false;
        }
    }
}

Constellation Constellation::make(Modulation m)
{
    switch (m) {
    case Modulation::bpsk:
        return Constellation(m, 1, {Complex{1.0, 0.0}, Complex{-1.0, 0.0}});
    case Modulation::qpsk:
        return Constellation(m, 2, psk_points(4, std::numbers::pi / 4.0));
    case Modulation::psk8:
        return Constellation(m, 3, psk_points(8, 0.0));
    case Modulation::qam16:
        return Constellation(m, 4, qam16_points());
    }
    throw std::invalid_argument("unknown modulation");
}

unsigned Constellation::nearest(Complex z) const
{
    unsigned best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (unsigned i = 0; i < points_.size(); ++i) {
        const double d = std::norm(z - points_[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<unsigned> bits_to_labels(std::span<const std::uint8_t> bits, const Constellation& c)
{
    const unsigned k = c.bits_per_symbol();
    if (bits.size() % k != 0) {
        throw std::domain_error("bits_to_labels: bit count is not a multiple of bits per symbol");
    }
    std::vector<unsigned> labels(bits.size() / k);
    for (std::size_t s = 0; s < labels.size(); ++s) {
        unsigned label = 0;
        for (unsigned b = 0; b < k; ++b) {
            label = (label << 1) | (bits[s * k + b] & 1u);
        }
        labels[s] = label;
    }
    return labels;
}

std::vector<std::uint8_t> labels_to_bits(std::span<const unsigned> labels, const Constellation& c)
{
    const unsigned k = c.bits_per_symbol();
    std::vector<std::uint8_t> bits(labels.size() * k);
    for (std::size_t s = 0; s < labels.size(); ++s) {
        for (unsigned b = 0; b < k; ++b) {
            bits[s * k + b] = static_cast<std::uint8_t>((labels[s] >> (k - 1 - b)) & 1u);
        }
    }
    return bits;
}

std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c)
{
    const auto labels = bits_to_labels(bits, c);
    std::vector<Complex> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = c.point(labels[i]);
    }
    return out;
}

std::vector<std::uint8_t> demap_bits(std::span<const Complex> symbols, const Constellation& c)
{
    std::vector<unsigned> labels(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        labels[i] = c.nearest(symbols[i]);
    }
    return labels_to_bits(labels, c);
}

unsigned bit_distance(unsigned a, unsigned b) { return static_cast<unsigned>(std::popcount(a ^ b)); }

UstcCodeword UstcCodeword::build(Complex v1, Complex v2)
{
    const double energy = std::norm(v1) + std::norm(v2);
    if (energy == 0.0) {
        throw std::domain_error("UstcCodeword: (v1, v2) must not both be zero");
    }
    const double g = 1.0 / std::sqrt(energy);
    UstcCodeword cw;
    cw.m_ = {g * v1, -g * std::conj(v2), g * v2, g * std::conj(v1)};
    return cw;
}

Vec2 UstcCodeword::apply(const Vec2& x) const
{
    return {m_[0] * x[0] + m_[1] * x[1], m_[2] * x[0] + m_[3] * x[1]};
}

double UstcCodeword::unitarity_error() const
{
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            Complex acc = std::conj(at(0, r)) * at(0, c) + std::conj(at(1, r)) * at(1, c);
            if (r == c) {
                acc -= 1.0;
            }
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

DifferentialState diff_encode(const DifferentialState& state, const UstcCodeword& cw)
{
    return {cw.apply(state.s), state.block_index + 1};
}

LabelPair diff_decode_joint(const Vec2& y_now, const Vec2& y_prev, const Constellation& c)
{
    LabelPair best;
    double best_metric = std::numeric_limits<double>::infinity();
    const auto& pts = c.points();
    for (unsigned a = 0; a < pts.size(); ++a) {
        for (unsigned b = 0; b < pts.size(); ++b) {
            const Vec2 pred = UstcCodeword::build(pts[a], pts[b]).apply(y_prev);
            const double metric = std::norm(y_now[0] - pred[0]) + std::norm(y_now[1] - pred[1]);
            if (metric < best_metric) {
                best_metric = metric;
                best = {a, b};
            }
        }
    }
    return best;
}

LabelPair diff_decode_decoupled(const Vec2& y_now, const Vec2& y_prev, const Constellation& c)
{
    if (!c.constant_modulus()) {
        throw UnsupportedConfiguration("decoupled differential decoding needs a constant-modulus constellation");
    }
    // ||y - V p||^2 = ||y||^2 + ||p||^2 - 2 Re(y^H V p) and, for |v1| = |v2|,
    // Re(y^H V p) separates into Re(v1 a1) + Re(v2 a2) up to a common scale.
    const Complex a1 = std::conj(y_now[0]) * y_prev[0] + y_now[1] * std::conj(y_prev[1]);
    const Complex a2 = std::conj(y_now[1]) * y_prev[0] - y_now[0] * std::conj(y_prev[1]);

    const auto pick = [&](Complex a) {
        unsigned best = 0;
        double best_corr = -std::numeric_limits<double>::infinity();
        const auto& pts = c.points();
        for (unsigned i = 0; i < pts.size(); ++i) {
            const double corr = std::real(pts[i] * a);
            if (corr > best_corr) {
                best_corr = corr;
                best = i;
            }
        }
        return best;
    };
    return {pick(a1), pick(a2)};
}

LabelPair diff_decode(const Vec2& y_now, const Vec2& y_prev, const Constellation& c)
{
    return c.constant_modulus() ? diff_decode_decoupled(y_now, y_prev, c)
                                : diff_decode_joint(y_now, y_prev, c);
}

double norm(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

} // namespace ddstc::modem
