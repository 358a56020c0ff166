// dsp.hpp - unitary DFT/IDFT, circular time-reversal, circular convolution
// and cyclic-prefix handling.
//
// Both transforms carry the symmetric 1/sqrt(N) scaling:
//
//   idft: X[m] = 1/sqrt(N) * sum_n x[n] exp(+j 2 pi n m / N)
//   dft:  y[n] = 1/sqrt(N) * sum_m Y[m] exp(-j 2 pi m n / N)
//
// so dft(idft(x)) == x and both preserve the Euclidean norm. Because of the
// unitary scaling, the convolution theorem picks up a sqrt(N) factor:
//
//   sqrt(N) * dft(circular_convolve(a, b)) == dft(a) .* dft(b)
//
// equivalently, a channel impulse response h acting on a block x gives
// dft(h (*) x)[n] == H[n] * dft(x)[n] with the non-unitary frequency response
// H[n] = sum_l h[l] exp(-j 2 pi l n / N).
//
// Power-of-two lengths use an iterative radix-2 FFT; other lengths fall back
// to direct summation. All functions are pure.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ddstc::dsp {

using Complex = std::complex<double>;
using ComplexSequence = std::vector<Complex>;

/// Precomputed twiddles for one transform length. Immutable after
/// construction, so a plan may be shared between threads.
class DftPlan {
public:
    explicit DftPlan(std::size_t n);

    std::size_t size() const { return n_; }

    /// In-place unitary DFT (negative exponent).
    void forward(std::span<Complex> data) const;
    /// In-place unitary IDFT (positive exponent).
    void inverse(std::span<Complex> data) const;

private:
    void transform(std::span<Complex> data, bool inverse) const;

    std::size_t n_;
    bool radix2_;
    double scale_;
    std::vector<Complex> twiddles_;   // exp(-j 2 pi k / N), k < N
    std::vector<std::size_t> bitrev_; // radix-2 only
};

/// Thread-local cached plan for length n.
const DftPlan& plan_for(std::size_t n);

ComplexSequence idft(std::span<const Complex> x);
ComplexSequence dft(std::span<const Complex> x);

/// out[0] = in[0], out[m] = in[N - m].
ComplexSequence circular_time_reversal(std::span<const Complex> x);

ComplexSequence conjugate(std::span<const Complex> x);

/// out[m] = sum_k a[k] * b[(m - k) mod N]. Operands must have equal length;
/// zero-pad the shorter one first.
ComplexSequence circular_convolve(std::span<const Complex> a, std::span<const Complex> b);

/// Prepends the last cp_len samples: output length N + cp_len.
ComplexSequence add_cyclic_prefix(std::span<const Complex> x, int cp_len);

/// Drops the first cp_len samples.
ComplexSequence remove_cyclic_prefix(std::span<const Complex> x, int cp_len);

double norm2(std::span<const Complex> x);

} // namespace ddstc::dsp
