#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "talaseg/error.hpp"
#include "talaseg/features.hpp"
#include "talaseg/onsets.hpp"
#include "talaseg/rng.hpp"
#include "talaseg/synthesis.hpp"
#include "test_util.hpp"

using namespace talaseg;
using namespace testutil;

namespace {

int row_argmax_lag(const Rhythmogram& rg, int row) {
  const double* r = rg.acf.row(row);
  int best = 1;
  for (int lag = 2; lag < rg.acf.cols; ++lag) {
    if (r[lag] > r[best]) best = lag;
  }
  return best;
}

}  // namespace

TEST_CASE("rhythmogram of a periodic impulse train peaks at every period multiple") {
  const OnsetDetectionFunction odf =
      impulse_odf(periodic_times(0.25, 0.0, 8.0), 8.0);
  const Rhythmogram rg = rhythmogram(odf);

  CHECK(rg.grid.rows == 9);  // floor((8-4)/0.5)+1
  CHECK(rg.acf.cols == 201);

  for (int row = 0; row < rg.grid.rows; ++row) {
    CHECK(rg.acf.at(row, 0) == 1.0);
    std::vector<double> peaks;
    for (int lag = 25; lag <= 200; lag += 25) peaks.push_back(rg.acf.at(row, lag));
    const double lo = *std::min_element(peaks.begin(), peaks.end());
    const double hi = *std::max_element(peaks.begin(), peaks.end());
    CHECK(hi <= lo * 1.05);
    CHECK(row_argmax_lag(rg, row) == 25);
  }
}

TEST_CASE("rhythmogram of silence is zero and short input errors") {
  OnsetDetectionFunction odf;
  odf.values.assign(600, 0.0);
  const Rhythmogram rg = rhythmogram(odf);
  for (double v : rg.acf.data) CHECK(v == 0.0);

  odf.values.assign(300, 1.0);  // 3 s < one 4 s window
  CHECK_THROWS_WITH_AS(rhythmogram(odf), doctest::Contains("too short"), Error);
}

TEST_CASE("rhythmogram tracks a periodicity splice") {
  // non-harmonic pair: a 0.25 s period would also correlate at lag 0.5 s and
  // drag the argmax transition late
  std::vector<double> times = periodic_times(0.5, 0.0, 10.0);
  const std::vector<double> fast = periodic_times(0.3, 10.0, 20.0);
  times.insert(times.end(), fast.begin(), fast.end());
  const Rhythmogram rg = rhythmogram(impulse_odf(times, 20.0));

  // the splice at t=10 s is centered in the row whose window is [10-2, 10+2)
  const int splice_row = static_cast<int>((10.0 - 2.0) / 0.5);
  int transition = -1;
  for (int row = 0; row + 1 < rg.grid.rows; ++row) {
    if (row_argmax_lag(rg, row) == 50 && row_argmax_lag(rg, row + 1) != 50) {
      transition = row + 1;
      break;
    }
  }
  REQUIRE(transition >= 0);
  CHECK(std::abs(transition - splice_row) <= 2);
  CHECK(row_argmax_lag(rg, 0) == 50);
  CHECK(row_argmax_lag(rg, rg.grid.rows - 1) == 30);
}

TEST_CASE("rhythmogram resolves a period-doubling splice away from it") {
  std::vector<double> times = periodic_times(0.5, 0.0, 10.0);
  const std::vector<double> fast = periodic_times(0.25, 10.0, 20.0);
  times.insert(times.end(), fast.begin(), fast.end());
  const Rhythmogram rg = rhythmogram(impulse_odf(times, 20.0));

  for (int row = 0; row < 10; ++row) CHECK(row_argmax_lag(rg, row) == 50);
  for (int row = 22; row < rg.grid.rows; ++row) CHECK(row_argmax_lag(rg, row) == 25);
}

TEST_CASE("rhythmogram rows are invariant to ODF scaling") {
  Rng rng(33);
  OnsetDetectionFunction odf;
  odf.values.assign(900, 0.0);
  for (double& v : odf.values) v = rng.uniform() < 0.08 ? rng.uniform(0.5, 2.0) : 0.0;

  OnsetDetectionFunction scaled = odf;
  for (double& v : scaled.values) v *= 7.5;

  const Rhythmogram a = rhythmogram(odf);
  const Rhythmogram b = rhythmogram(scaled);
  for (size_t i = 0; i < a.acf.data.size(); ++i) {
    CHECK(b.acf.data[i] == doctest::Approx(a.acf.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("asd counts onsets per window") {
  OnsetList onsets;
  for (int i = 0; i < 600; ++i) onsets.times.push_back(0.001 + i * 0.1);
  const AsdCurve curve = asd(onsets, 60.0);
  REQUIRE(curve.grid.rows == 113);
  for (int g = 0; g < curve.grid.rows; ++g) {
    CHECK(curve.values[g] == 10.0);  // 40 onsets in every 4 s window
  }

  const AsdCurve empty = asd(OnsetList{}, 30.0);
  for (double v : empty.values) CHECK(v == 0.0);
}

TEST_CASE("asd equals a brute-force window count on random onsets") {
  Rng rng(41);
  OnsetList onsets;
  double t = 0.0;
  while (t < 45.0) {
    t += rng.uniform(0.02, 0.6);
    onsets.times.push_back(t);
  }
  const AsdCurve curve = asd(onsets, 45.0);
  for (int g = 0; g < curve.grid.rows; ++g) {
    const double start = g * 0.5;
    int count = 0;
    for (double x : onsets.times) {
      if (x >= start && x < start + 4.0) ++count;
    }
    CHECK(curve.values[g] == count / 4.0);
  }
}

TEST_CASE("statistics batch reproduces the dataset ASD moments") {
  BatchOptions options;
  options.render_mode = RenderMode::Odf;
  const std::vector<ConcertSpec> batch = statistics_batch(50, 2024, options);

  std::vector<double> concert_means;
  for (const ConcertSpec& spec : batch) {
    const GeneratedConcert gen = generate_concert(spec);
    OnsetList onsets;
    onsets.times = gen.onset_times;
    const AsdCurve curve = asd(onsets, gen.truth.duration_s);
    const double mean = std::accumulate(curve.values.begin(), curve.values.end(), 0.0) /
                        curve.values.size();
    concert_means.push_back(mean);
  }

  const double mean = std::accumulate(concert_means.begin(), concert_means.end(), 0.0) /
                      concert_means.size();
  double var = 0.0;
  for (double m : concert_means) var += (m - mean) * (m - mean);
  const double stddev = std::sqrt(var / concert_means.size());

  CHECK(mean == doctest::Approx(10.62).epsilon(0.05));
  CHECK(stddev == doctest::Approx(3.9).epsilon(0.05));
}

TEST_CASE("short-time energy basics") {
  AudioBuffer silence;
  silence.sample_rate = 16000;
  silence.samples.assign(16000 * 8, 0.0);
  for (double v : short_time_energy(silence).values) CHECK(v == 0.0);

  AudioBuffer step;
  step.sample_rate = 16000;
  step.samples.assign(16000 * 20, 0.0);
  for (size_t i = 16000 * 10; i < step.samples.size(); ++i) step.samples[i] = 0.5;
  const SteCurve curve = short_time_energy(step);
  // frames whose 2 s window spans [9, 11] rise monotonically
  const int lo = static_cast<int>((9.0 - 2.0) / 0.5);
  const int hi = static_cast<int>((11.0 - 2.0) / 0.5);
  for (int g = lo; g < hi; ++g) CHECK(curve.values[g + 1] >= curve.values[g]);
  CHECK(curve.values[hi] > curve.values[lo]);

  AudioBuffer doubled = step;
  for (double& v : doubled.samples) v *= 2.0;
  const SteCurve curve2 = short_time_energy(doubled);
  for (int g = 0; g < curve.grid.rows; ++g) {
    CHECK(curve2.values[g] == doctest::Approx(4.0 * curve.values[g]).epsilon(1e-12));
  }
}

TEST_CASE("mfcc dimensions and delta behavior") {
  AudioBuffer constant;
  constant.sample_rate = 16000;
  constant.samples.assign(16000 * 6, 0.25);
  const MfccMatrix m = mfcc_features(constant);
  CHECK(m.coeffs.cols == 57);
  CHECK(m.coeffs.rows == m.grid.rows);
  for (int g = 0; g < m.coeffs.rows; ++g) {
    for (int c = 19; c < 57; ++c) {
      CHECK(m.coeffs.at(g, c) == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("mfcc separates white noise from a tone") {
  Rng rng(55);
  AudioBuffer noise;
  noise.sample_rate = 16000;
  noise.samples.resize(16000 * 6);
  for (double& v : noise.samples) v = rng.uniform(-0.5, 0.5);
  const AudioBuffer pitch = tone(200.0, 6.0, 16000, 0.5);

  const MfccMatrix a = mfcc_features(noise);
  const MfccMatrix b = mfcc_features(pitch);

  auto stats = [](const MfccMatrix& m) {
    std::vector<double> mean(57, 0.0);
    for (int g = 0; g < m.coeffs.rows; ++g) {
      for (int c = 0; c < 57; ++c) mean[c] += m.coeffs.at(g, c);
    }
    for (double& v : mean) v /= m.coeffs.rows;
    double scatter = 0.0;
    for (int g = 0; g < m.coeffs.rows; ++g) {
      double d2 = 0.0;
      for (int c = 0; c < 57; ++c) {
        const double diff = m.coeffs.at(g, c) - mean[c];
        d2 += diff * diff;
      }
      scatter += d2;
    }
    return std::make_pair(mean, std::sqrt(scatter / m.coeffs.rows));
  };

  const auto [mean_a, std_a] = stats(a);
  const auto [mean_b, std_b] = stats(b);
  double dist2 = 0.0;
  for (int c = 0; c < 57; ++c) {
    const double diff = mean_a[c] - mean_b[c];
    dist2 += diff * diff;
  }
  CHECK(std::sqrt(dist2) > 5.0 * std::max(std_a, std_b));
}

TEST_CASE("feature tracks share one grid for a recording") {
  ConcertSpec spec;
  spec.seed = 77;
  spec.render_mode = RenderMode::Audio;
  SectionSpec s;
  s.label = "ka";
  s.duration_s = 30.0;
  s.base_density = 8.0;
  s.pattern = {1.0, 0.5, 1.5};
  spec.sections.push_back(s);
  const GeneratedConcert gen = generate_concert(spec);

  const EnvelopeSignal env{gen.audio.samples, gen.audio.sample_rate};
  const OnsetDetectionFunction odf = spectral_flux_odf(env);
  const double duration = odf.values.size() / odf.frame_rate;

  const Rhythmogram rg = rhythmogram(odf);
  const AsdCurve a = asd(detect_onsets(odf), duration);
  const SteCurve e = short_time_energy(gen.audio, rg.grid.rows);
  const MfccMatrix m = mfcc_features(gen.audio, rg.grid.rows);

  CHECK(rg.grid.rows == a.grid.rows);
  CHECK(rg.grid.rows == e.grid.rows);
  CHECK(rg.grid.rows == m.grid.rows);
  CHECK(static_cast<int>(e.values.size()) == rg.grid.rows);
  CHECK(m.coeffs.rows == rg.grid.rows);
}
