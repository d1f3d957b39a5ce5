#include "talaseg/fft.hpp"

#include <cmath>

namespace talaseg {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void fft_pow2(std::vector<Complex>& x, bool inverse) {
  const size_t n = x.size();
  if (n <= 1) return;

  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const Complex wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        Complex u = x[i + k];
        Complex v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= inv;
  }
}

namespace {

/// Bluestein chirp-z transform: exact DFT of arbitrary length via a
/// power-of-two convolution.
void bluestein(std::vector<Complex>& x, bool inverse) {
  const long long n = static_cast<long long>(x.size());
  const size_t m = static_cast<size_t>(next_pow2(static_cast<int>(2 * n - 1)));
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<Complex> chirp(n);
  for (long long k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the twiddle argument small and exact
    const long long q = (k * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(q) / static_cast<double>(n);
    chirp[k] = Complex(std::cos(ang), std::sin(ang));
  }

  std::vector<Complex> a(m, Complex(0.0, 0.0));
  std::vector<Complex> b(m, Complex(0.0, 0.0));
  for (long long k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (long long k = 1; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    b[m - k] = b[k];
  }

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, true);

  for (long long k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= inv;
  }
}

}  // namespace

void fft_any(std::vector<Complex>& x, bool inverse) {
  if (x.size() <= 1) return;
  if (is_pow2(x.size())) {
    fft_pow2(x, inverse);
  } else {
    bluestein(x, inverse);
  }
}

namespace {

/// Packed real transform: bins 0..N/2 of the DFT of a real frame via one
/// complex FFT of size N/2.
std::vector<Complex> real_bins(const std::vector<double>& frame, int fft_size) {
  const int half = fft_size / 2;
  std::vector<Complex> z(static_cast<size_t>(half), Complex(0.0, 0.0));
  const size_t n = std::min(frame.size(), static_cast<size_t>(fft_size));
  for (size_t i = 0; i < n; ++i) {
    if (i & 1) {
      z[i / 2] += Complex(0.0, frame[i]);
    } else {
      z[i / 2] += Complex(frame[i], 0.0);
    }
  }
  fft_pow2(z, false);

  std::vector<Complex> x(static_cast<size_t>(half + 1));
  for (int k = 0; k <= half; ++k) {
    const Complex zk = k == half ? z[0] : z[k];
    const Complex zc = std::conj(k == 0 ? z[0] : z[half - k]);
    const Complex even = 0.5 * (zk + zc);
    const Complex odd = Complex(0.0, -0.5) * (zk - zc);
    const double ang = -2.0 * kPi * k / fft_size;
    x[k] = even + Complex(std::cos(ang), std::sin(ang)) * odd;
  }
  return x;
}

}  // namespace

std::vector<double> real_magnitude_spectrum(const std::vector<double>& frame, int fft_size) {
  const std::vector<Complex> x = real_bins(frame, fft_size);
  std::vector<double> mag(x.size());
  for (size_t i = 0; i < x.size(); ++i) mag[i] = std::abs(x[i]);
  return mag;
}

std::vector<double> real_power_spectrum(const std::vector<double>& frame, int fft_size) {
  const std::vector<Complex> x = real_bins(frame, fft_size);
  std::vector<double> power(x.size());
  for (size_t i = 0; i < x.size(); ++i) power[i] = std::norm(x[i]);
  return power;
}

}  // namespace talaseg
