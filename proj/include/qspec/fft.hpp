#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qspec::fft {

// Thin wrappers over FFTW. Plans are cached per length behind a mutex; the
// transforms themselves may be called concurrently from any thread.

/// Forward DFT of a real sequence, X[j] = sum_t x[t] e^{-2 pi i j t / n},
/// for j = 0..n/2 (out.size() must be n/2 + 1).
void forward_real(std::span<const double> in, std::span<std::complex<double>> out);

/// Convenience overload returning the n/2 + 1 non-redundant coefficients.
std::vector<std::complex<double>> forward_real(std::span<const double> in);

/// Inverse of forward_real without the 1/n factor: x[t] = sum_j X[j] e^{+2 pi i j t / n}.
/// `n` is the length of the real output. `in` is clobbered.
void inverse_real(std::span<std::complex<double>> in, std::span<double> out);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace qspec::fft
