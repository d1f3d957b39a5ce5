#pragma once

#include <complex>
#include <vector>

namespace talaseg {

using Complex = std::complex<double>;

/// In-place radix-2 FFT; size must be a power of two.
void fft_pow2(std::vector<Complex>& x, bool inverse);

/// DFT of arbitrary length (radix-2 when possible, Bluestein otherwise).
void fft_any(std::vector<Complex>& x, bool inverse);

/// Magnitudes of the non-negative-frequency bins of a real frame, zero-padded
/// to fft_size (a power of two). Returns fft_size/2 + 1 values. Uses the
/// packed real-input transform (one complex FFT of half the size).
std::vector<double> real_magnitude_spectrum(const std::vector<double>& frame, int fft_size);

/// Same bins as squared magnitudes.
std::vector<double> real_power_spectrum(const std::vector<double>& frame, int fft_size);

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace talaseg
