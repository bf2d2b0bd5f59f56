#pragma once

// Thin wrapper over FFTW. Plans are created once per (length, direction)
// under a lock and then executed concurrently on caller-owned buffers.

#include <complex>
#include <span>

namespace fmcwsim::detail {

enum class FftSign { forward = -1, backward = +1 };

/// Unnormalized in-place DFT: X[k] = sum_n x[n] exp(sign * j 2 pi k n / N).
void fft_inplace(std::span<std::complex<double>> data, FftSign sign);

}  // namespace fmcwsim::detail
