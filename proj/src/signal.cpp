#include "talaseg/signal.hpp"

#include <algorithm>
#include <cmath>

#include "talaseg/error.hpp"
#include "talaseg/fft.hpp"

namespace talaseg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
  return w;
}

double sinc(double x) {
  if (std::fabs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

/// Levinson-Durbin on autocorrelation r[0..order]; returns prediction
/// coefficients a[1..order] (x_hat[n] = sum a_k x[n-k]).
std::vector<double> levinson(const std::vector<double>& r, int order) {
  std::vector<double> a(order + 1, 0.0);
  double err = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc -= a[j] * r[i - j];
    if (err <= 0.0) break;  // numerically exhausted; keep lower-order fit
    double k = acc / err;
    if (k > 1.0) k = 1.0;
    if (k < -1.0) k = -1.0;
    std::vector<double> prev(a.begin(), a.begin() + i);
    a[i] = k;
    for (int j = 1; j < i; ++j) a[j] = prev[j] - k * prev[i - j];
    err *= (1.0 - k * k);
  }
  return a;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw Error(Errc::invalid_argument, "target rate must be positive");
  if (buf.sample_rate <= 0) throw Error(Errc::invalid_argument, "source rate must be positive");
  if (target_rate == buf.sample_rate) return buf;

  const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
  const int64_t in_len = static_cast<int64_t>(buf.samples.size());
  const int64_t out_len = static_cast<int64_t>(std::llround(in_len * ratio));

  // normalized cutoff in cycles per input sample, below both Nyquists
  const double cutoff = 0.5 * 0.945 * std::min(1.0, ratio);
  const int lobes = 10;
  const double half_width = lobes / (2.0 * cutoff);
  const int taps = static_cast<int>(std::ceil(half_width));

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<size_t>(out_len), 0.0);

  const double* in = buf.samples.data();
  double* dst = out.samples.data();

#pragma omp parallel for schedule(static)
  for (int64_t m = 0; m < out_len; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const int64_t n0 = static_cast<int64_t>(std::floor(center)) - taps;
    const int64_t n1 = static_cast<int64_t>(std::floor(center)) + taps + 1;
    double acc = 0.0;
    double norm = 0.0;
    for (int64_t n = n0; n <= n1; ++n) {
      const double u = static_cast<double>(n) - center;
      if (std::fabs(u) > half_width) continue;
      // Blackman-windowed sinc at the cutoff
      const double wu = u / half_width;
      const double w = 0.42 + 0.5 * std::cos(kPi * wu) + 0.08 * std::cos(2.0 * kPi * wu);
      const double k = 2.0 * cutoff * sinc(2.0 * cutoff * u) * w;
      norm += k;
      if (n >= 0 && n < in_len) acc += in[n] * k;
    }
    dst[m] = norm > 1e-12 ? acc / norm : 0.0;
  }
  return out;
}

std::vector<double> lp_residual(const AudioBuffer& buf, int order, double frame_s,
                                double hop_s) {
  if (order < 1) throw Error(Errc::invalid_argument, "LP order must be >= 1");
  if (!(frame_s > hop_s && hop_s > 0.0)) {
    throw Error(Errc::invalid_argument, "need frame > hop > 0");
  }
  const int rate = buf.sample_rate;
  const int frame = static_cast<int>(std::lround(frame_s * rate));
  const int hop = static_cast<int>(std::lround(hop_s * rate));
  if (frame < order + 1) throw Error(Errc::too_short, "frame shorter than LP order + 1");

  const int64_t len = static_cast<int64_t>(buf.samples.size());
  std::vector<double> residual(buf.samples.size(), 0.0);
  if (len == 0) return residual;

  const std::vector<double> analysis = hann_window(frame);
  const std::vector<double> synthesis = hann_window(frame);  // COLA at 50% hop
  const int n_frames = static_cast<int>((len + hop - 1) / hop);
  const double* x = buf.samples.data();

  // Frames at 50% overlap: frames of the same parity never overlap, so two
  // passes give a race-free deterministic overlap-add.
  for (int parity = 0; parity < 2; ++parity) {
#pragma omp parallel for schedule(static)
    for (int f = parity; f < n_frames; f += 2) {
      const int64_t start = static_cast<int64_t>(f) * hop;
      const int64_t avail = std::min<int64_t>(frame, len - start);

      std::vector<double> w(frame, 0.0);
      for (int64_t i = 0; i < avail; ++i) w[i] = x[start + i] * analysis[i];

      std::vector<double> r(order + 1, 0.0);
      for (int lag = 0; lag <= order; ++lag) {
        double acc = 0.0;
        for (int i = lag; i < frame; ++i) acc += w[i] * w[i - lag];
        r[lag] = acc;
      }

      if (r[0] <= 0.0) {
        // all-zero frame: residual equals the input frame
        for (int64_t i = 0; i < avail; ++i) {
          residual[start + i] += x[start + i] * synthesis[i];
        }
        continue;
      }

      const std::vector<double> a = levinson(r, order);
      for (int64_t i = 0; i < avail; ++i) {
        const int64_t n = start + i;
        double pred = 0.0;
        for (int k = 1; k <= order; ++k) {
          if (n - k >= 0) pred += a[k] * x[n - k];
        }
        residual[n] += (x[n] - pred) * synthesis[i];
      }
    }
  }

  // Windows sum to 1 except at the very edges of the signal; renormalize there.
  std::vector<double> wsum(buf.samples.size(), 0.0);
  for (int f = 0; f < n_frames; ++f) {
    const int64_t start = static_cast<int64_t>(f) * hop;
    const int64_t avail = std::min<int64_t>(frame, len - start);
    for (int64_t i = 0; i < avail; ++i) wsum[start + i] += synthesis[i];
  }
  for (size_t i = 0; i < residual.size(); ++i) {
    if (wsum[i] > 1e-9) residual[i] /= wsum[i];
  }
  return residual;
}

namespace {

std::vector<double> analytic_magnitude(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<Complex> buf(n);
  for (size_t i = 0; i < n; ++i) buf[i] = Complex(x[i], 0.0);
  fft_any(buf, false);

  // zero negative frequencies, double strictly positive ones; DC and the
  // Nyquist bin (even n) are untouched
  const size_t half = n / 2;
  for (size_t k = 1; k < (n + 1) / 2; ++k) buf[k] *= 2.0;
  for (size_t k = half + 1; k < n; ++k) buf[k] = Complex(0.0, 0.0);
  fft_any(buf, true);

  std::vector<double> env(n);
  for (size_t i = 0; i < n; ++i) env[i] = std::abs(buf[i]);
  return env;
}

}  // namespace

std::vector<double> hilbert_envelope(const std::vector<double>& x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "non-finite input");
  }
  if (x.empty()) return {};
  return analytic_magnitude(x);
}

EnvelopeSignal hilbert_envelope_blocked(const std::vector<double>& x, int sample_rate) {
  EnvelopeSignal env;
  env.sample_rate = sample_rate;

  const int64_t len = static_cast<int64_t>(x.size());
  const int64_t block = next_pow2(static_cast<int>(std::min<int64_t>(
      std::max<int64_t>(4LL * sample_rate, 16), 1 << 22)));
  if (len <= block) {
    env.values = hilbert_envelope(x);
    return env;
  }

  const int64_t overlap = block / 16;
  const int64_t step = block - overlap;
  env.values.assign(x.size(), 0.0);

  const int n_blocks = static_cast<int>((len - overlap + step - 1) / step);

  std::vector<std::vector<double>> pieces(n_blocks);
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < n_blocks; ++b) {
    const int64_t start = static_cast<int64_t>(b) * step;
    const int64_t bl = std::min<int64_t>(block, len - start);
    std::vector<double> piece(x.begin() + start, x.begin() + start + bl);
    pieces[b] = hilbert_envelope(piece);
  }

  for (int b = 0; b < n_blocks; ++b) {
    const int64_t start = static_cast<int64_t>(b) * step;
    const auto& piece = pieces[b];
    for (int64_t i = 0; i < static_cast<int64_t>(piece.size()); ++i) {
      const int64_t n = start + i;
      double gain = 1.0;
      if (b > 0 && i < overlap) gain = static_cast<double>(i) / overlap;  // fade in
      if (b + 1 < n_blocks && n >= start + step) {
        gain = std::min(gain, static_cast<double>(block - i) / overlap);  // fade out
      }
      env.values[n] += piece[i] * gain;
    }
  }
  return env;
}

EnvelopeSignal preprocess_envelope(const AudioBuffer& buf) {
  const std::vector<double> residual = lp_residual(buf);
  return hilbert_envelope_blocked(residual, buf.sample_rate);
}

}  // namespace talaseg
