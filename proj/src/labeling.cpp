#include "talaseg/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "talaseg/error.hpp"

namespace talaseg {

namespace {

constexpr double kAlapOnsetDensity = 0.5;  // onsets/s below which a segment is quiet
constexpr double kShortSegment = 50.0;     // s; GTC-style composition length
constexpr double kAsdDrop = 3.0;           // strokes/s
constexpr double kPeSearchRatio = 0.15;
constexpr double kKaSearchBack = 0.25;

int onsets_in(const OnsetList& onsets, double start, double end) {
  auto lo = std::lower_bound(onsets.times.begin(), onsets.times.end(), start);
  auto hi = std::lower_bound(onsets.times.begin(), onsets.times.end(), end);
  return static_cast<int>(hi - lo);
}

/// Grid frame range whose centers fall in [start, end); clamped non-empty.
std::pair<int, int> grid_range(const FeatureGrid& grid, double start, double end) {
  int lo = static_cast<int>(
      std::ceil((start - FeatureGrid::kWindow / 2.0) / FeatureGrid::kHop - 1e-9));
  int hi = static_cast<int>(
      std::floor((end - FeatureGrid::kWindow / 2.0) / FeatureGrid::kHop - 1e-9));
  lo = std::clamp(lo, 0, grid.rows - 1);
  hi = std::clamp(hi, 0, grid.rows - 1);
  if (hi < lo) hi = lo;
  return {lo, hi};
}

double mean_asd_over(const AsdCurve& asd, double start, double end) {
  const auto [lo, hi] = grid_range(asd.grid, start, end);
  double acc = 0.0;
  for (int g = lo; g <= hi; ++g) acc += asd.values[g];
  return acc / (hi - lo + 1);
}

double snap_to_boundary(const Segmentation& seg, double t) {
  double best = t;
  double best_d = std::numeric_limits<double>::infinity();
  for (double b : seg.boundaries_s) {
    const double d = std::fabs(b - t);
    if (d < best_d) {
      best_d = d;
      best = b;
    }
  }
  return seg.boundaries_s.empty() ? t : best;
}

}  // namespace

double detect_alap(const Segmentation& seg, const OnsetList& onsets,
                   const MfccMatrix& mfcc) {
  const int n_seg = seg.segment_count();

  // quiet segments by onset density
  std::vector<bool> quiet(n_seg, false);
  for (int i = 0; i < n_seg; ++i) {
    const double start = seg.segment_start(i);
    const double end = seg.segment_end(i);
    const double density = onsets_in(onsets, start, end) / std::max(end - start, 1e-9);
    quiet[i] = density < kAlapOnsetDensity;
  }

  // percussive-region MFCC statistics
  const int dims = mfcc.coeffs.cols;
  std::vector<double> perc_mean(dims, 0.0);
  int perc_frames = 0;
  for (int i = 0; i < n_seg; ++i) {
    if (quiet[i]) continue;
    const auto [lo, hi] = grid_range(mfcc.grid, seg.segment_start(i), seg.segment_end(i));
    for (int g = lo; g <= hi; ++g) {
      const double* row = mfcc.coeffs.row(g);
      for (int d = 0; d < dims; ++d) perc_mean[d] += row[d];
      ++perc_frames;
    }
  }

  if (perc_frames == 0) {
    // nothing percussive anywhere: every segment is alap by the density rule
    double end = 0.0;
    for (int i = 0; i < n_seg && quiet[i]; ++i) end = seg.segment_end(i);
    return end;
  }

  for (double& v : perc_mean) v /= perc_frames;
  double scatter = 0.0;
  for (int i = 0; i < n_seg; ++i) {
    if (quiet[i]) continue;
    const auto [lo, hi] = grid_range(mfcc.grid, seg.segment_start(i), seg.segment_end(i));
    for (int g = lo; g <= hi; ++g) {
      const double* row = mfcc.coeffs.row(g);
      double d2 = 0.0;
      for (int d = 0; d < dims; ++d) {
        const double diff = row[d] - perc_mean[d];
        d2 += diff * diff;
      }
      scatter += d2;
    }
  }
  const double frame_std = std::sqrt(scatter / perc_frames);

  double alap_end = 0.0;
  for (int i = 0; i < n_seg; ++i) {
    if (!quiet[i]) break;
    const auto [lo, hi] = grid_range(mfcc.grid, seg.segment_start(i), seg.segment_end(i));
    std::vector<double> seg_mean(dims, 0.0);
    for (int g = lo; g <= hi; ++g) {
      const double* row = mfcc.coeffs.row(g);
      for (int d = 0; d < dims; ++d) seg_mean[d] += row[d];
    }
    for (double& v : seg_mean) v /= (hi - lo + 1);
    double dist2 = 0.0;
    for (int d = 0; d < dims; ++d) {
      const double diff = seg_mean[d] - perc_mean[d];
      dist2 += diff * diff;
    }
    if (std::sqrt(dist2) <= frame_std) break;  // timbre says percussive after all
    alap_end = seg.segment_end(i);
  }
  return alap_end;
}

std::pair<double, double> init_section_boundaries(double duration_s, double alap_end) {
  if (!(duration_s > 0.0)) throw Error(Errc::invalid_argument, "duration must be positive");
  const double span = duration_s - alap_end;
  return {alap_end + 0.3 * span, alap_end + 0.72 * span};
}

double refine_ka_gtc(const Segmentation& seg, double ka_gtc0, double alap_end) {
  const double earliest = ka_gtc0 - kKaSearchBack * seg.duration_s;
  const int n_seg = seg.segment_count();

  int run_start = -1;
  for (int i = 0; i < n_seg; ++i) {
    const double len = seg.segment_end(i) - seg.segment_start(i);
    if (len < kShortSegment) {
      if (run_start < 0) run_start = i;
    } else {
      if (run_start >= 0 && i - run_start >= 2) {
        const double start = seg.segment_start(run_start);
        const double run_end = seg.segment_start(i);
        if (run_end > earliest && start >= alap_end) return start;
      }
      run_start = -1;
    }
  }
  if (run_start >= 0 && n_seg - run_start >= 2) {
    const double start = seg.segment_start(run_start);
    if (seg.duration_s > earliest && start >= alap_end) return start;
  }
  return std::max(snap_to_boundary(seg, ka_gtc0), alap_end);
}

double refine_pe_ka(const Segmentation& seg, const AsdCurve& asd, double pe_ka0,
                    double alap_end) {
  const double window = kPeSearchRatio * seg.duration_s;
  double best = -1.0;
  double best_d = std::numeric_limits<double>::infinity();

  for (double b : seg.boundaries_s) {
    if (b < alap_end || std::fabs(b - pe_ka0) > window) continue;
    const double before = mean_asd_over(asd, b - 10.0, b);
    const double after = mean_asd_over(asd, b, b + 10.0);
    if (before - after >= kAsdDrop && std::fabs(b - pe_ka0) < best_d) {
      best_d = std::fabs(b - pe_ka0);
      best = b;
    }
  }
  if (best >= 0.0) return best;
  const double snapped = snap_to_boundary(seg, pe_ka0);
  // the refinement stays within the search window; fall back to the initial
  // point when the nearest boundary lies outside it
  if (std::fabs(snapped - pe_ka0) > window) return std::max(pe_ka0, alap_end);
  return std::max(snapped, alap_end);
}

SectionLabels label_sections(const Segmentation& seg, double alap_end, double pe_ka,
                             double ka_gtc) {
  if (!(0.0 <= alap_end && alap_end <= pe_ka && pe_ka <= ka_gtc &&
        ka_gtc <= seg.duration_s)) {
    throw Error(Errc::invalid_argument, "section boundary ordering violated");
  }
  SectionLabels out;
  out.alap_end = alap_end;
  out.pe_ka = pe_ka;
  out.ka_gtc = ka_gtc;
  out.segment_labels.reserve(seg.segment_count());
  for (int i = 0; i < seg.segment_count(); ++i) {
    const double mid = 0.5 * (seg.segment_start(i) + seg.segment_end(i));
    SectionLabel label;
    if (mid < alap_end) {
      label = SectionLabel::Alap;
    } else if (mid < pe_ka) {
      label = SectionLabel::Pe;
    } else if (mid < ka_gtc) {
      label = SectionLabel::Ka;
    } else {
      label = SectionLabel::Gtc;
    }
    out.segment_labels.push_back(label);
  }
  return out;
}

SectionLabels label_concert(const Segmentation& seg, const OnsetList& onsets,
                            const MfccMatrix& mfcc, const AsdCurve& asd) {
  const double alap_end = detect_alap(seg, onsets, mfcc);
  if (alap_end >= seg.duration_s) {
    throw Error(Errc::degenerate, "no percussive content");
  }
  const auto [pe_ka0, ka_gtc0] = init_section_boundaries(seg.duration_s, alap_end);
  const double ka_gtc = refine_ka_gtc(seg, ka_gtc0, alap_end);
  double pe_ka = refine_pe_ka(seg, asd, pe_ka0, alap_end);
  pe_ka = std::min(pe_ka, ka_gtc);
  return label_sections(seg, alap_end, pe_ka, ka_gtc);
}

std::vector<LabeledSpan> to_spans(const Segmentation& seg, const SectionLabels& labels) {
  std::vector<LabeledSpan> spans;
  for (int i = 0; i < seg.segment_count(); ++i) {
    const SectionLabel label = labels.segment_labels[i];
    if (!spans.empty() && spans.back().label == label) {
      spans.back().end_s = seg.segment_end(i);
    } else {
      spans.push_back({seg.segment_start(i), seg.segment_end(i), label});
    }
  }
  return spans;
}

}  // namespace talaseg
