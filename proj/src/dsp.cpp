#include "ddstc/dsp.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace ddstc::dsp {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_nonempty(std::span<const Complex> x, const char* what)
{
    if (x.empty()) {
        throw std::domain_error(std::string(what) + ": empty sequence");
    }
}

} // namespace

DftPlan::DftPlan(std::size_t n)
    : n_(n), radix2_(is_power_of_two(n)), scale_(0.0)
{
    if (n == 0) {
        throw std::domain_error("DftPlan: length must be >= 1");
    }
    scale_ = 1.0 / std::sqrt(static_cast<double>(n));
    twiddles_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddles_[k] = Complex(std::cos(phase), std::sin(phase));
    }
    if (radix2_) {
        bitrev_.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) {
            ++bits;
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b) {
                if (i & (std::size_t{1} << b)) {
                    r |= std::size_t{1} << (bits - 1 - b);
                }
            }
            bitrev_[i] = r;
        }
    }
}

void DftPlan::forward(std::span<Complex> data) const { transform(data, false); }

void DftPlan::inverse(std::span<Complex> data) const { transform(data, true); }

void DftPlan::transform(std::span<Complex> data, bool inverse) const
{
    if (data.size() != n_) {
        throw std::domain_error("DftPlan: length mismatch");
    }
    const auto twiddle = [&](std::size_t k) {
        return inverse ? std::conj(twiddles_[k]) : twiddles_[k];
    };

    if (!radix2_) {
        // Direct summation; index product reduced mod N to stay on the table.
        ComplexSequence out(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            Complex acc{0.0, 0.0};
            for (std::size_t m = 0; m < n_; ++m) {
                acc += data[m] * twiddle((k * m) % n_);
            }
            out[k] = acc * scale_;
        }
        std::copy(out.begin(), out.end(), data.begin());
        return;
    }

    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) {
            std::swap(data[i], data[j]);
        }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex w = twiddle(k * stride);
                const Complex u = data[start + k];
                const Complex v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }
    for (auto& x : data) {
        x *= scale_;
    }
}

const DftPlan& plan_for(std::size_t n)
{
    thread_local std::unordered_map<std::size_t, std::unique_ptr<DftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<DftPlan>(n)).first;
    }
    return *it->second;
}

ComplexSequence idft(std::span<const Complex> x)
{
    require_nonempty(x, "idft");
    ComplexSequence out(x.begin(), x.end());
    plan_for(out.size()).inverse(out);
    return out;
}

ComplexSequence dft(std::span<const Complex> x)
{
    require_nonempty(x, "dft");
    ComplexSequence out(x.begin(), x.end());
    plan_for(out.size()).forward(out);
    return out;
}

ComplexSequence circular_time_reversal(std::span<const Complex> x)
{
    require_nonempty(x, "circular_time_reversal");
    const std::size_t n = x.size();
    ComplexSequence out(n);
    out[0] = x[0];
    for (std::size_t m = 1; m < n; ++m) {
        out[m] = x[n - m];
    }
    return out;
}

ComplexSequence conjugate(std::span<const Complex> x)
{
    ComplexSequence out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::conj(x[i]);
    }
    return out;
}

ComplexSequence circular_convolve(std::span<const Complex> a, std::span<const Complex> b)
{
    require_nonempty(a, "circular_convolve");
    if (a.size() != b.size()) {
        throw std::domain_error("circular_convolve: operand lengths differ");
    }
    const std::size_t n = a.size();
    ComplexSequence out(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k] == Complex{0.0, 0.0}) {
            continue;
        }
        for (std::size_t m = 0; m < n; ++m) {
            out[(m + k) % n] += a[k] * b[m];
        }
    }
    return out;
}

ComplexSequence add_cyclic_prefix(std::span<const Complex> x, int cp_len)
{
    require_nonempty(x, "add_cyclic_prefix");
    if (cp_len < 0 || static_cast<std::size_t>(cp_len) > x.size()) {
        throw std::domain_error("add_cyclic_prefix: prefix length must lie in [0, N]");
    }
    const auto l = static_cast<std::size_t>(cp_len);
    ComplexSequence out;
    out.reserve(x.size() + l);
    out.insert(out.end(), x.end() - static_cast<std::ptrdiff_t>(l), x.end());
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

ComplexSequence remove_cyclic_prefix(std::span<const Complex> x, int cp_len)
{
    if (cp_len < 0 || x.size() < static_cast<std::size_t>(cp_len) + 1) {
        throw std::domain_error("remove_cyclic_prefix: input shorter than prefix + 1");
    }
    return ComplexSequence(x.begin() + cp_len, x.end());
}

double norm2(std::span<const Complex> x)
{
    double acc = 0.0;
    for (const auto& v : x) {
        acc += std::norm(v);
    }
    return acc;
}

} // namespace ddstc::dsp
