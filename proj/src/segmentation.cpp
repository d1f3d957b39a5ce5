#include "talaseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "talaseg/error.hpp"
#include "talaseg/novelty.hpp"

namespace talaseg {

BoundaryCandidates pick_peaks(const NoveltyCurve& nf, double threshold,
                              double min_interval_s) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw Error(Errc::invalid_argument, "threshold must be in [0, 1]");
  }
  const std::vector<double>& v = nf.values;
  const int n = static_cast<int>(v.size());

  std::vector<int> peaks;
  for (int t = 1; t + 1 < n; ++t) {
    const bool local_max =
        v[t] >= v[t - 1] && v[t] >= v[t + 1] && (v[t] > v[t - 1] || v[t] > v[t + 1]);
    if (local_max && v[t] > threshold) peaks.push_back(t);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](int a, int b) { return v[a] > v[b]; });

  BoundaryCandidates out;
  out.source = nf.kind;
  std::vector<double> accepted;
  for (int t : peaks) {
    const double time = nf.grid.center(t);
    bool clear = true;
    for (double a : accepted) {
      if (std::fabs(a - time) < min_interval_s) {
        clear = false;
        break;
      }
    }
    if (clear) accepted.push_back(time);
  }
  std::sort(accepted.begin(), accepted.end());
  for (double t : accepted) {
    const int idx = static_cast<int>(std::lround((t - FeatureGrid::kWindow / 2.0) /
                                                 FeatureGrid::kHop));
    out.times_s.push_back(t);
    out.scores.push_back(v[std::clamp(idx, 0, n - 1)]);
  }
  return out;
}

NoveltyCurve combo_average(const std::vector<NoveltyCurve>& nfs) {
  bool has_asd = false, has_r = false, has_p = false;
  for (const auto& nf : nfs) {
    if (nf.kind == NoveltyKind::AsdD) has_asd = true;
    if (nf.kind == NoveltyKind::SsmRhythmogram) has_r = true;
    if (nf.kind == NoveltyKind::SsmPosterior) has_p = true;
  }
  if (nfs.size() != 3 || !has_asd || !has_r || !has_p) {
    throw Error(Errc::invalid_argument, "combo average needs exactly ASD-D, NF-R, NF-P");
  }
  const size_t n = nfs[0].values.size();
  for (const auto& nf : nfs) {
    if (nf.values.size() != n) {
      throw Error(Errc::dimension_mismatch, "curves are misaligned");
    }
  }

  NoveltyCurve out;
  out.kind = NoveltyKind::SsmPosterior;  // combined curve; kind is informational
  out.grid = nfs[0].grid;
  out.values.assign(n, 0.0);
  for (const auto& nf : nfs) {
    for (size_t i = 0; i < n; ++i) out.values[i] += nf.values[i];
  }
  for (double& v : out.values) v /= 3.0;
  max_normalize(out.values);
  return out;
}

Segmentation to_segmentation(const BoundaryCandidates& candidates, double duration_s,
                             double min_segment_s) {
  Segmentation seg;
  seg.duration_s = duration_s;
  for (size_t i = 0; i < candidates.times_s.size(); ++i) {
    const double t = candidates.times_s[i];
    if (t < min_segment_s || t > duration_s - min_segment_s) continue;
    if (!seg.boundaries_s.empty() && t - seg.boundaries_s.back() < min_segment_s) {
      continue;
    }
    seg.boundaries_s.push_back(t);
  }
  return seg;
}

Segmentation fuse_majority(const std::vector<BoundaryCandidates>& candidates,
                           const BoundaryCandidates& reference, double duration_s,
                           double coincidence_window_s, double min_interval_s) {
  bool has_asd = false, has_rf = false, has_r = false;
  for (const auto& c : candidates) {
    if (c.source == NoveltyKind::AsdD) has_asd = true;
    if (c.source == NoveltyKind::RhythmFlux) has_rf = true;
    if (c.source == NoveltyKind::SsmRhythmogram) has_r = true;
  }
  if (candidates.size() != 3 || !has_asd || !has_rf || !has_r ||
      reference.source != NoveltyKind::SsmPosterior) {
    throw Error(Errc::invalid_argument,
                "majority fusion needs ASD-D, NF-RF, NF-R against NF-P");
  }

  BoundaryCandidates fused;
  fused.source = reference.source;
  for (size_t i = 0; i < reference.times_s.size(); ++i) {
    const double t = reference.times_s[i];
    int support = 0;
    for (const auto& c : candidates) {
      for (double ct : c.times_s) {
        if (std::fabs(ct - t) <= coincidence_window_s) {
          ++support;
          break;
        }
      }
    }
    if (support >= 2) {
      fused.times_s.push_back(t);
      fused.scores.push_back(reference.scores[i]);
    }
  }
  return to_segmentation(fused, duration_s, min_interval_s);
}

namespace {

/// Mean ASD and modal posterior class over the grid frames whose centers fall
/// in [start, end).
struct SegmentStats {
  double mean_asd = 0.0;
  int modal_class = -1;
};

SegmentStats segment_stats(double start, double end, const AsdCurve& asd,
                           const std::vector<int>& classes) {
  SegmentStats st;
  int lo = static_cast<int>(std::ceil((start - FeatureGrid::kWindow / 2.0) /
                                          FeatureGrid::kHop -
                                      1e-9));
  int hi = static_cast<int>(std::floor((end - FeatureGrid::kWindow / 2.0) /
                                           FeatureGrid::kHop -
                                       1e-9));
  lo = std::clamp(lo, 0, asd.grid.rows - 1);
  hi = std::clamp(hi, 0, asd.grid.rows - 1);
  if (hi < lo) hi = lo;

  double acc = 0.0;
  std::map<int, int> votes;
  for (int g = lo; g <= hi; ++g) {
    acc += asd.values[g];
    ++votes[classes[g]];
  }
  st.mean_asd = acc / (hi - lo + 1);
  int best_count = -1;
  for (const auto& [cls, count] : votes) {
    if (count > best_count) {  // map order breaks ties toward the lower class
      best_count = count;
      st.modal_class = cls;
    }
  }
  return st;
}

}  // namespace

Segmentation merge_segments(const Segmentation& seg, const AsdCurve& asd,
                            const PosteriorSequence& post, double asd_threshold) {
  if (asd.grid.rows != post.grid.rows) {
    throw Error(Errc::dimension_mismatch, "ASD and posteriors are misaligned");
  }
  const std::vector<int> classes = post.argmax_classes();

  Segmentation merged = seg;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t b = 0; b < merged.boundaries_s.size();) {
      const double start_a = b == 0 ? 0.0 : merged.boundaries_s[b - 1];
      const double end_a = merged.boundaries_s[b];
      const double end_b = b + 1 < merged.boundaries_s.size()
                               ? merged.boundaries_s[b + 1]
                               : merged.duration_s;

      const SegmentStats sa = segment_stats(start_a, end_a, asd, classes);
      const SegmentStats sb = segment_stats(end_a, end_b, asd, classes);

      if (std::fabs(sa.mean_asd - sb.mean_asd) < asd_threshold &&
          sa.modal_class == sb.modal_class) {
        merged.boundaries_s.erase(merged.boundaries_s.begin() + b);
        changed = true;
        // the merged segment's stats change; rescan from its left neighbor
      } else {
        ++b;
      }
    }
  }
  return merged;
}

}  // namespace talaseg
