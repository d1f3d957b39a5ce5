#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace talaseg {

/// Dense row-major matrix of doubles. Kept deliberately small; the feature
/// tracks are a few thousand rows at most.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  bool empty() const { return rows == 0 || cols == 0; }
};

/// Mono audio, samples in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Non-negative magnitude envelope at the audio rate.
struct EnvelopeSignal {
  std::vector<double> values;
  int sample_rate = 0;
};

/// Onset detection function sampled at 10 ms (100 Hz).
struct OnsetDetectionFunction {
  std::vector<double> values;
  double frame_rate = 100.0;

  double duration() const { return values.size() / frame_rate; }
};

/// Strictly increasing onset times in seconds.
struct OnsetList {
  std::vector<double> times;
};

/// The shared 0.5 s analysis grid: frame i covers [0.5*i, 0.5*i + 4) seconds.
/// The grid starts once a full 4 s window fits.
struct FeatureGrid {
  int rows = 0;

  static constexpr double kHop = 0.5;
  static constexpr double kWindow = 4.0;

  static FeatureGrid from_duration(double duration_s) {
    FeatureGrid g;
    if (duration_s >= kWindow) {
      g.rows = static_cast<int>(std::floor((duration_s - kWindow) / kHop + 1e-9)) + 1;
    }
    return g;
  }

  double start(int i) const { return i * kHop; }
  double center(int i) const { return i * kHop + kWindow / 2.0; }
};

/// Short-time ACF of the ODF: rows on the shared grid, 201 lags (0..2 s at 10 ms).
struct Rhythmogram {
  static constexpr int kLags = 201;
  static constexpr double kLagStep = 0.01;

  Matrix acf;  // rows x kLags
  FeatureGrid grid;
};

/// Average stroke density, strokes per second, on the shared grid.
struct AsdCurve {
  std::vector<double> values;
  FeatureGrid grid;
};

/// Mean short-time energy on the shared grid.
struct SteCurve {
  std::vector<double> values;
  FeatureGrid grid;
};

/// 57-dim MFCC+delta+delta-delta rows, 2 s averaged, on the shared grid.
struct MfccMatrix {
  static constexpr int kDims = 57;

  Matrix coeffs;  // rows x 57
  FeatureGrid grid;
};

/// Per-frame GMM posterior rows (each row a probability vector).
struct PosteriorSequence {
  Matrix probs;  // rows x k
  FeatureGrid grid;

  /// Argmax class per frame, ties toward the lower index.
  std::vector<int> argmax_classes() const {
    std::vector<int> out(probs.rows, 0);
    for (int i = 0; i < probs.rows; ++i) {
      const double* r = probs.row(i);
      int best = 0;
      for (int k = 1; k < probs.cols; ++k) {
        if (r[k] > r[best]) best = k;
      }
      out[i] = best;
    }
    return out;
  }
};

/// The six novelty curves of the segmentation front end.
enum class NoveltyKind { AsdD, SteD, RhythmFlux, SsmRhythmogram, SsmPosterior, SsmMfcc };

inline const char* novelty_label(NoveltyKind kind) {
  switch (kind) {
    case NoveltyKind::AsdD: return "ASD-D";
    case NoveltyKind::SteD: return "STE-D";
    case NoveltyKind::RhythmFlux: return "NF-RF";
    case NoveltyKind::SsmRhythmogram: return "NF-R";
    case NoveltyKind::SsmPosterior: return "NF-P";
    case NoveltyKind::SsmMfcc: return "NF-M";
  }
  return "?";
}

struct NoveltyCurve {
  std::vector<double> values;
  NoveltyKind kind = NoveltyKind::AsdD;
  FeatureGrid grid;
};

struct NoveltySet {
  std::array<NoveltyCurve, 6> curves;  // indexed by NoveltyKind order

  NoveltyCurve& of(NoveltyKind k) { return curves[static_cast<int>(k)]; }
  const NoveltyCurve& of(NoveltyKind k) const { return curves[static_cast<int>(k)]; }
};

/// Peak-picked boundary candidates from one novelty curve.
struct BoundaryCandidates {
  std::vector<double> times_s;
  std::vector<double> scores;
  NoveltyKind source = NoveltyKind::AsdD;
};

/// Interior boundary times; segments are [0, b1), [b1, b2), ..., [bn, duration].
struct Segmentation {
  double duration_s = 0.0;
  std::vector<double> boundaries_s;

  int segment_count() const { return static_cast<int>(boundaries_s.size()) + 1; }
  double segment_start(int i) const { return i == 0 ? 0.0 : boundaries_s[i - 1]; }
  double segment_end(int i) const {
    return i == static_cast<int>(boundaries_s.size()) ? duration_s : boundaries_s[i];
  }
};

enum class SectionLabel { Alap, Pe, Ka, Gtc };

inline const char* section_name(SectionLabel s) {
  switch (s) {
    case SectionLabel::Alap: return "alap";
    case SectionLabel::Pe: return "pe";
    case SectionLabel::Ka: return "ka";
    case SectionLabel::Gtc: return "gtc";
  }
  return "?";
}

/// High-level section boundaries plus the per-segment label assignment.
struct SectionLabels {
  double alap_end = 0.0;  // 0 when no alap
  double pe_ka = 0.0;
  double ka_gtc = 0.0;
  std::vector<SectionLabel> segment_labels;  // one per segment of the Segmentation
};

struct LabeledSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  SectionLabel label = SectionLabel::Pe;
};

}  // namespace talaseg
