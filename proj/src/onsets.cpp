#include "talaseg/onsets.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "talaseg/error.hpp"
#include "talaseg/fft.hpp"
#include "talaseg/kernels.hpp"

namespace talaseg {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

OnsetDetectionFunction spectral_flux_odf(const EnvelopeSignal& env) {
  if (env.values.empty()) throw Error(Errc::invalid_argument, "empty envelope");
  const int rate = env.sample_rate;
  if (rate < 200) throw Error(Errc::invalid_argument, "envelope rate too low");

  const int hop = static_cast<int>(std::lround(rate * 0.010));
  const int win = static_cast<int>(std::lround(rate * 0.020));
  const int fft_size = next_pow2(win);
  const int64_t len = static_cast<int64_t>(env.values.size());
  const int n_frames = static_cast<int>((len + hop - 1) / hop);
  const int n_bins = fft_size / 2 + 1;

  std::vector<double> window(win);
  for (int i = 0; i < win; ++i) window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / win));

  Matrix mags(n_frames, n_bins);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n_frames; ++t) {
    std::vector<double> frame(win, 0.0);
    const int64_t start = static_cast<int64_t>(t) * hop;
    // tail frames replicate the last sample so the final frames carry no
    // spurious flux
    for (int64_t i = 0; i < win; ++i) {
      frame[i] = env.values[std::min(start + i, len - 1)] * window[i];
    }
    const std::vector<double> mag = real_magnitude_spectrum(frame, fft_size);
    std::copy(mag.begin(), mag.end(), mags.row(t));
  }

  OnsetDetectionFunction odf;
  odf.values.assign(n_frames, 0.0);
  for (int t = 1; t < n_frames; ++t) {
    double flux = 0.0;
    const double* cur = mags.row(t);
    const double* prev = mags.row(t - 1);
    for (int b = 0; b < n_bins; ++b) {
      const double d = cur[b] - prev[b];
      if (d > 0.0) flux += d;
    }
    odf.values[t] = flux;
  }
  return odf;
}

OnsetList detect_onsets(const OnsetDetectionFunction& odf, double threshold,
                        double min_gap_s) {
  if (!(min_gap_s > 0.0)) throw Error(Errc::invalid_argument, "min_gap must be positive");
  if (!(threshold > 0.0)) throw Error(Errc::invalid_argument, "threshold must be positive");

  const int n = static_cast<int>(odf.values.size());
  OnsetList onsets;
  if (n < 3) return onsets;

  const int median_win = static_cast<int>(std::lround(odf.frame_rate));  // 1 s
  const std::vector<double> med = moving_median(odf.values, median_win);

  const std::vector<double>& v = odf.values;
  // absolute floor against the recording's own scale: quiet melodic regions
  // must not fire off their internal flux ripple through the relative
  // threshold (scales with the ODF, so times stay scale-invariant)
  const double floor_value = 0.012 * *std::max_element(v.begin(), v.end());

  std::vector<int> candidates;
  for (int t = 1; t + 1 < n; ++t) {
    const bool local_max =
        v[t] >= v[t - 1] && v[t] >= v[t + 1] && (v[t] > v[t - 1] || v[t] > v[t + 1]);
    if (local_max && v[t] > threshold * med[t] && v[t] > floor_value) {
      candidates.push_back(t);
    }
  }

  // larger peaks claim their neighborhood first; equal values go to the earlier
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](int a, int b) { return v[a] > v[b]; });

  const double frame_dt = 1.0 / odf.frame_rate;
  std::set<double> accepted;
  for (int t : candidates) {
    const double time = (t + 0.5) * frame_dt;  // center of the 10 ms frame
    auto next = accepted.lower_bound(time);
    if (next != accepted.end() && *next - time < min_gap_s) continue;
    if (next != accepted.begin() && time - *std::prev(next) < min_gap_s) continue;
    accepted.insert(time);
  }
  onsets.times.assign(accepted.begin(), accepted.end());
  return onsets;
}

}  // namespace talaseg
