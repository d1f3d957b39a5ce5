#include "talaseg/features.hpp"

#include <algorithm>
#include <cmath>

#include "talaseg/error.hpp"
#include "talaseg/fft.hpp"

namespace talaseg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kMelBands = 40;
constexpr int kMfccCoeffs = 19;
constexpr double kLogFloor = 1e-10;

/// 2 s mean of base-rate frames (hop base_hop_s) centered on each grid frame.
Matrix average_onto_grid(const Matrix& base, double base_hop_s, const FeatureGrid& grid) {
  Matrix out(grid.rows, base.cols);
  const double half = 1.0;  // 2 s averaging window
  for (int g = 0; g < grid.rows; ++g) {
    const double center = grid.center(g);
    int lo = static_cast<int>(std::ceil((center - half) / base_hop_s - 1e-9));
    int hi = static_cast<int>(std::floor((center + half) / base_hop_s - 1e-9));
    lo = std::max(lo, 0);
    hi = std::min(hi, base.rows - 1);
    double* dst = out.row(g);
    if (hi < lo) continue;
    for (int t = lo; t <= hi; ++t) {
      const double* src = base.row(t);
      for (int c = 0; c < base.cols; ++c) dst[c] += src[c];
    }
    const double inv = 1.0 / (hi - lo + 1);
    for (int c = 0; c < base.cols; ++c) dst[c] *= inv;
  }
  return out;
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular mel filter: non-zero bin span plus the weights inside it.
struct MelFilter {
  int first_bin = 0;
  std::vector<double> weights;
};

std::vector<MelFilter> mel_filterbank(int n_bins, int fft_size, int sample_rate,
                                      double f_hi) {
  std::vector<MelFilter> fb(kMelBands);
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(f_hi);
  std::vector<double> edges(kMelBands + 2);
  for (int i = 0; i < kMelBands + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (kMelBands + 1));
  }
  const double bin_hz = static_cast<double>(sample_rate) / fft_size;
  for (int m = 0; m < kMelBands; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    const int lo = std::max(0, static_cast<int>(std::ceil(left / bin_hz)));
    const int hi = std::min(n_bins - 1, static_cast<int>(std::floor(right / bin_hz)));
    fb[m].first_bin = lo;
    for (int b = lo; b <= hi; ++b) {
      const double f = b * bin_hz;
      double w = 0.0;
      if (f <= center && center > left) {
        w = (f - left) / (center - left);
      } else if (f > center && right > center) {
        w = (right - f) / (right - center);
      }
      fb[m].weights.push_back(w);
    }
  }
  return fb;
}

/// +-2-frame regression deltas with edge replication.
Matrix regression_delta(const Matrix& coeffs) {
  Matrix out(coeffs.rows, coeffs.cols);
  const int n = coeffs.rows;
  auto clamp_row = [&](int t) { return std::clamp(t, 0, n - 1); };
  for (int t = 0; t < n; ++t) {
    double* dst = out.row(t);
    for (int c = 0; c < coeffs.cols; ++c) {
      double acc = 0.0;
      for (int d = 1; d <= 2; ++d) {
        acc += d * (coeffs.at(clamp_row(t + d), c) - coeffs.at(clamp_row(t - d), c));
      }
      dst[c] = acc / 10.0;  // 2 * (1^2 + 2^2)
    }
  }
  return out;
}

}  // namespace

Rhythmogram rhythmogram(const OnsetDetectionFunction& odf) {
  const int window = static_cast<int>(std::lround(FeatureGrid::kWindow * odf.frame_rate));
  const int hop = static_cast<int>(std::lround(FeatureGrid::kHop * odf.frame_rate));
  const int n = static_cast<int>(odf.values.size());
  if (n < window) throw Error(Errc::too_short, "recording too short");

  Rhythmogram rg;
  rg.grid.rows = (n - window) / hop + 1;
  rg.acf = Matrix(rg.grid.rows, Rhythmogram::kLags);

  const double* x = odf.values.data();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rg.grid.rows; ++r) {
    const double* w = x + static_cast<size_t>(r) * hop;
    double mean = 0.0;
    for (int i = 0; i < window; ++i) mean += w[i];
    mean /= window;

    double* row = rg.acf.row(r);
    // prefix energies of the mean-removed window for per-lag normalization
    std::vector<double> prefix(window + 1, 0.0);
    for (int i = 0; i < window; ++i) {
      const double d = w[i] - mean;
      prefix[i + 1] = prefix[i] + d * d;
    }
    if (prefix[window] <= 1e-30) continue;  // all-zero (constant) window

    row[0] = 1.0;
    for (int lag = 1; lag < Rhythmogram::kLags; ++lag) {
      double acc = 0.0;
      for (int i = lag; i < window; ++i) {
        acc += (w[i] - mean) * (w[i - lag] - mean);
      }
      // per-lag normalized correlation (bounded by construction, so periodic
      // peaks keep their height across lags); the light lag window breaks
      // exact ties at period multiples toward the fundamental
      const double head = prefix[window - lag];
      const double tail = prefix[window] - prefix[lag];
      const double norm = std::sqrt(head * tail);
      const double value =
          norm > 1e-30 ? acc / norm * (1.0 - 2e-4 * lag) : 0.0;
      row[lag] = std::clamp(value, -1.0, 1.0);
    }
  }
  return rg;
}

AsdCurve asd(const OnsetList& onsets, double duration_s) {
  AsdCurve curve;
  curve.grid = FeatureGrid::from_duration(duration_s);
  curve.values.assign(curve.grid.rows, 0.0);

  for (int g = 0; g < curve.grid.rows; ++g) {
    const double start = curve.grid.start(g);
    const double end = start + FeatureGrid::kWindow;
    auto lo = std::lower_bound(onsets.times.begin(), onsets.times.end(), start);
    auto hi = std::lower_bound(onsets.times.begin(), onsets.times.end(), end);
    curve.values[g] = static_cast<double>(hi - lo) / 4.0;
  }
  return curve;
}

SteCurve short_time_energy(const AudioBuffer& buf, int grid_rows) {
  if (buf.samples.empty()) throw Error(Errc::audio_empty, "empty buffer");
  const int rate = buf.sample_rate;
  const int win = static_cast<int>(std::lround(rate * 0.025));
  const int hop = static_cast<int>(std::lround(rate * 0.005));
  const int64_t len = static_cast<int64_t>(buf.samples.size());
  const int n_frames = static_cast<int>((len + hop - 1) / hop);

  Matrix base(n_frames, 1);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n_frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * hop;
    const int64_t avail = std::min<int64_t>(win, len - start);
    double acc = 0.0;
    for (int64_t i = 0; i < avail; ++i) {
      const double v = buf.samples[start + i];
      acc += v * v;
    }
    base.at(t, 0) = acc / win;
  }

  SteCurve curve;
  curve.grid = grid_rows >= 0 ? FeatureGrid{grid_rows}
                              : FeatureGrid::from_duration(buf.duration());
  Matrix averaged = average_onto_grid(base, 0.005, curve.grid);
  curve.values.assign(curve.grid.rows, 0.0);
  for (int g = 0; g < curve.grid.rows; ++g) curve.values[g] = averaged.at(g, 0);
  return curve;
}

MfccMatrix mfcc_features(const AudioBuffer& buf, int grid_rows) {
  if (buf.samples.empty()) throw Error(Errc::audio_empty, "empty buffer");
  const int rate = buf.sample_rate;
  const int win = static_cast<int>(std::lround(rate * 0.025));
  const int hop = static_cast<int>(std::lround(rate * 0.005));
  const int fft_size = next_pow2(win);
  const int n_bins = fft_size / 2 + 1;
  const int64_t len = static_cast<int64_t>(buf.samples.size());
  const int n_frames = static_cast<int>((len + hop - 1) / hop);

  const std::vector<double> window = hann_window(win);
  const std::vector<MelFilter> fb =
      mel_filterbank(n_bins, fft_size, rate, std::min(8000.0, rate / 2.0));

  // DCT-II basis for coefficients 1..19
  Matrix dct(kMfccCoeffs, kMelBands);
  for (int j = 0; j < kMfccCoeffs; ++j) {
    for (int m = 0; m < kMelBands; ++m) {
      dct.at(j, m) = std::sqrt(2.0 / kMelBands) *
                     std::cos(kPi * (j + 1) * (m + 0.5) / kMelBands);
    }
  }

  Matrix cepstra(n_frames, kMfccCoeffs);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n_frames; ++t) {
    std::vector<double> frame(win, 0.0);
    const int64_t start = static_cast<int64_t>(t) * hop;
    const int64_t avail = std::min<int64_t>(win, len - start);
    for (int64_t i = 0; i < avail; ++i) frame[i] = buf.samples[start + i] * window[i];

    const std::vector<double> power = real_power_spectrum(frame, fft_size);
    std::vector<double> log_mel(kMelBands);
    for (int m = 0; m < kMelBands; ++m) {
      double e = 0.0;
      for (size_t i = 0; i < fb[m].weights.size(); ++i) {
        e += fb[m].weights[i] * power[fb[m].first_bin + static_cast<int>(i)];
      }
      log_mel[m] = std::log(std::max(e, kLogFloor));
    }
    double* dst = cepstra.row(t);
    for (int j = 0; j < kMfccCoeffs; ++j) {
      double acc = 0.0;
      const double* basis = dct.row(j);
      for (int m = 0; m < kMelBands; ++m) acc += basis[m] * log_mel[m];
      dst[j] = acc;
    }
  }

  const Matrix delta = regression_delta(cepstra);
  const Matrix delta2 = regression_delta(delta);

  Matrix stacked(n_frames, MfccMatrix::kDims);
  for (int t = 0; t < n_frames; ++t) {
    double* dst = stacked.row(t);
    std::copy(cepstra.row(t), cepstra.row(t) + kMfccCoeffs, dst);
    std::copy(delta.row(t), delta.row(t) + kMfccCoeffs, dst + kMfccCoeffs);
    std::copy(delta2.row(t), delta2.row(t) + kMfccCoeffs, dst + 2 * kMfccCoeffs);
  }

  MfccMatrix out;
  out.grid = grid_rows >= 0 ? FeatureGrid{grid_rows}
                            : FeatureGrid::from_duration(buf.duration());
  out.coeffs = average_onto_grid(stacked, 0.005, out.grid);
  return out;
}

}  // namespace talaseg
