#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "talaseg/error.hpp"
#include "talaseg/rng.hpp"
#include "talaseg/eval.hpp"
#include "talaseg/pipeline.hpp"
#include "talaseg/segmentation.hpp"
#include "talaseg/synthesis.hpp"
#include "test_util.hpp"

using namespace talaseg;
using namespace testutil;

namespace {

NoveltyCurve curve_from(const std::vector<double>& values, NoveltyKind kind) {
  NoveltyCurve nf;
  nf.values = values;
  nf.kind = kind;
  nf.grid = FeatureGrid{static_cast<int>(values.size())};
  return nf;
}

BoundaryCandidates candidates_at(const std::vector<double>& times, NoveltyKind kind) {
  BoundaryCandidates c;
  c.times_s = times;
  c.scores.assign(times.size(), 1.0);
  c.source = kind;
  return c;
}

/// Five-composition ODF concert, densities far apart, with an optional pause
/// or speed doubling in the middle composition.
ConcertSpec merge_fixture(uint64_t seed, bool with_pause, bool with_speed_change) {
  ConcertSpec spec;
  spec.seed = seed;
  spec.render_mode = RenderMode::Odf;
  const double densities[5] = {6.0, 10.0, 14.0, 18.0, 22.0};
  for (int i = 0; i < 5; ++i) {
    SectionSpec s;
    s.label = i < 3 ? "ka" : "gtc";
    s.duration_s = i == 1 ? 240.0 : 120.0;
    s.base_density = densities[i];
    s.pattern = {1.0};
    if (i == 1 && with_pause) s.pauses.push_back(TimedSpan{118.5, 3.0});
    if (i == 1 && with_speed_change) s.speed_steps.push_back(SpeedStep{120.0, 2.0});
    spec.sections.push_back(s);
  }
  return spec;
}

}  // namespace

TEST_CASE("pick_peaks basics") {
  CHECK(pick_peaks(curve_from(std::vector<double>(80, 0.0), NoveltyKind::AsdD), 0.1)
            .times_s.empty());

  // peaks 6 s (12 frames) apart: only the higher one survives the interval
  std::vector<double> v(100, 0.0);
  v[40] = 0.9;
  v[52] = 0.8;
  const BoundaryCandidates c = pick_peaks(curve_from(v, NoveltyKind::AsdD), 0.1, 10.0);
  REQUIRE(c.times_s.size() == 1);
  CHECK(c.times_s[0] == doctest::Approx(FeatureGrid{}.center(40)));
  CHECK(c.scores[0] == doctest::Approx(0.9));

  CHECK_THROWS_AS(pick_peaks(curve_from(v, NoveltyKind::AsdD), 1.5), Error);
}

TEST_CASE("pick_peaks recovers the boundaries of a synthetic concert") {
  ConcertSpec spec = merge_fixture(5, false, false);
  const GeneratedConcert gen = generate_concert(spec);
  PipelineConfig config;
  const FeatureBundle f = compute_features_from_odf(gen.odf, config);
  const NoveltySet set = compute_novelties(f, config);

  const BoundaryCandidates c =
      pick_peaks(set.of(NoveltyKind::SsmRhythmogram), 0.1, 10.0);
  for (double truth : gen.truth.boundaries_s) {
    double best = 1e9;
    for (double t : c.times_s) best = std::min(best, std::fabs(t - truth));
    CHECK(best <= 5.0);
  }
}

TEST_CASE("combo average contracts") {
  std::vector<double> base(60, 0.0);
  base[20] = 1.0;
  base[45] = 0.5;
  const NoveltyCurve a = curve_from(base, NoveltyKind::AsdD);
  const NoveltyCurve r = curve_from(base, NoveltyKind::SsmRhythmogram);
  const NoveltyCurve p = curve_from(base, NoveltyKind::SsmPosterior);

  const NoveltyCurve combined = combo_average({a, r, p});
  for (size_t i = 0; i < base.size(); ++i) {
    CHECK(combined.values[i] == doctest::Approx(base[i]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(combo_average({a, r}), Error);
  CHECK_THROWS_AS(
      combo_average({a, r, curve_from(base, NoveltyKind::SsmMfcc)}), Error);
}

TEST_CASE("combo average de-emphasizes unsupported peaks") {
  std::vector<double> with_true(60, 0.0), only_one(60, 0.0);
  with_true[20] = 1.0;
  only_one[20] = 1.0;
  only_one[40] = 1.0;  // spurious peak in a single curve

  const NoveltyCurve combined =
      combo_average({curve_from(only_one, NoveltyKind::AsdD),
                     curve_from(with_true, NoveltyKind::SsmRhythmogram),
                     curve_from(with_true, NoveltyKind::SsmPosterior)});
  CHECK(combined.values[20] > combined.values[40]);
  CHECK(combined.values[20] == doctest::Approx(1.0));
  CHECK(combined.values[40] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("majority fusion accepts by support count") {
  const double dur = 400.0;
  const BoundaryCandidates ref =
      candidates_at({100.0, 200.0, 300.0}, NoveltyKind::SsmPosterior);
  const std::vector<BoundaryCandidates> others = {
      candidates_at({101.0, 199.0}, NoveltyKind::AsdD),
      candidates_at({99.0, 302.0}, NoveltyKind::RhythmFlux),
      candidates_at({102.0}, NoveltyKind::SsmRhythmogram),
  };

  const Segmentation seg = fuse_majority(others, ref, dur, 5.0);
  // 100: support 3 -> in; 200: support 1 -> out; 300: support 1 -> out
  REQUIRE(seg.boundaries_s.size() == 1);
  CHECK(seg.boundaries_s[0] == 100.0);

  CHECK_THROWS_AS(fuse_majority({others[0], others[1]}, ref, dur, 5.0), Error);
  CHECK_THROWS_AS(fuse_majority(others, others[0], dur, 5.0), Error);
}

TEST_CASE("fusion output is a subset of reference peaks") {
  Rng rng(100);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> ref_times;
    double t = 15.0;
    while (t < 580.0) {
      ref_times.push_back(t);
      t += rng.uniform(11.0, 60.0);
    }
    auto random_times = [&](int n) {
      std::vector<double> out;
      for (int i = 0; i < n; ++i) out.push_back(rng.uniform(10.0, 590.0));
      std::sort(out.begin(), out.end());
      return out;
    };
    const Segmentation seg = fuse_majority(
        {candidates_at(random_times(8), NoveltyKind::AsdD),
         candidates_at(random_times(8), NoveltyKind::RhythmFlux),
         candidates_at(random_times(8), NoveltyKind::SsmRhythmogram)},
        candidates_at(ref_times, NoveltyKind::SsmPosterior), 600.0, 5.0);
    for (double b : seg.boundaries_s) {
      CHECK(std::find(ref_times.begin(), ref_times.end(), b) != ref_times.end());
    }
  }
}

TEST_CASE("to_segmentation enforces the minimum segment length") {
  const BoundaryCandidates c =
      candidates_at({4.0, 50.0, 57.0, 195.0}, NoveltyKind::SsmPosterior);
  const Segmentation seg = to_segmentation(c, 200.0, 10.0);
  CHECK(seg.boundaries_s == std::vector<double>{50.0});
}

namespace {

struct MergeInputs {
  AsdCurve asd;
  PosteriorSequence post;
};

/// Constructed grid tracks: per-span (end_frame, asd, class) triples.
MergeInputs grid_tracks(const std::vector<std::tuple<int, double, int>>& spans,
                        int k = 3) {
  MergeInputs m;
  const int rows = std::get<0>(spans.back());
  m.asd.grid = FeatureGrid{rows};
  m.post.grid = FeatureGrid{rows};
  m.asd.values.assign(rows, 0.0);
  m.post.probs = Matrix(rows, k);
  int start = 0;
  for (const auto& [end, asd_value, cls] : spans) {
    for (int g = start; g < end; ++g) {
      m.asd.values[g] = asd_value;
      for (int c = 0; c < k; ++c) m.post.probs.at(g, c) = c == cls ? 0.9 : 0.05;
    }
    start = end;
  }
  return m;
}

}  // namespace

TEST_CASE("merge joins similar neighbors and keeps distinct ones") {
  // 200 s grid (393 rows); the 100 s boundary starts at frame 196
  const MergeInputs close_by = grid_tracks({{196, 10.1, 0}, {393, 9.0, 0}});
  Segmentation seg;
  seg.duration_s = 200.0;
  seg.boundaries_s = {100.0};
  const Segmentation merged = merge_segments(seg, close_by.asd, close_by.post);
  CHECK(merged.boundaries_s.empty());

  const MergeInputs apart = grid_tracks({{196, 10.0, 0}, {393, 14.0, 0}});
  const Segmentation kept = merge_segments(seg, apart.asd, apart.post);
  CHECK(kept.boundaries_s == std::vector<double>{100.0});

  // close M-ASD but different majority classes
  const MergeInputs cls = grid_tracks({{196, 10.0, 0}, {393, 9.5, 1}});
  const Segmentation kept2 = merge_segments(seg, cls.asd, cls.post);
  CHECK(kept2.boundaries_s == std::vector<double>{100.0});
}

TEST_CASE("merge is idempotent") {
  const MergeInputs m = grid_tracks(
      {{98, 8.0, 0}, {200, 8.5, 0}, {298, 14.0, 1}, {393, 14.2, 1}});
  Segmentation seg;
  seg.duration_s = 200.0;
  seg.boundaries_s = {51.0, 102.0, 151.0};
  const Segmentation once = merge_segments(seg, m.asd, m.post);
  const Segmentation twice = merge_segments(once, m.asd, m.post);
  CHECK(once.boundaries_s == twice.boundaries_s);
  CHECK(once.boundaries_s == std::vector<double>{102.0});
}

TEST_CASE("pause split merges, speed doubling does not") {
  PipelineConfig config;
  const double boundary = 240.0;  // the pause splits the second composition here

  for (uint64_t seed : {61ull, 62ull, 63ull}) {
    const GeneratedConcert paused =
        generate_concert(merge_fixture(seed, true, false));
    const FeatureBundle fp = compute_features_from_odf(paused.odf, config);
    Segmentation split;
    split.duration_s = fp.duration_s;
    split.boundaries_s = {120.0, boundary, 360.0, 480.0, 600.0};
    const Segmentation merged = merge_segments(split, fp.asd, fp.posteriors);
    CHECK(std::find(merged.boundaries_s.begin(), merged.boundaries_s.end(), boundary) ==
          merged.boundaries_s.end());
    CHECK(merged.boundaries_s.size() == 4);

    const GeneratedConcert doubled =
        generate_concert(merge_fixture(seed, false, true));
    const FeatureBundle fd = compute_features_from_odf(doubled.odf, config);
    Segmentation split2 = split;
    const Segmentation kept = merge_segments(split2, fd.asd, fd.posteriors);
    CHECK(std::find(kept.boundaries_s.begin(), kept.boundaries_s.end(), boundary) !=
          kept.boundaries_s.end());
  }
}

TEST_CASE("combo-2 precision is no worse than combo-1 on pause fixtures") {
  PipelineConfig config;
  int tp1 = 0, fp1 = 0, tp2 = 0, fp2 = 0;

  for (uint64_t seed = 300; seed < 320; ++seed) {
    ConcertSpec spec;
    spec.seed = seed;
    spec.render_mode = RenderMode::Odf;
    Rng rng(seed);
    const double densities[4] = {6.0, 11.0, 16.0, 21.0};
    for (int i = 0; i < 4; ++i) {
      SectionSpec s;
      s.label = "ka";
      s.duration_s = rng.uniform(90.0, 130.0);
      s.base_density = densities[i] + rng.uniform(-0.5, 0.5);
      s.pattern = {1.0};
      if (i % 2 == 1) {
        // one mid-composition pause per even fixture half
        s.pauses.push_back(TimedSpan{s.duration_s / 2.0, rng.uniform(2.0, 3.5)});
      }
      spec.sections.push_back(s);
    }
    const GeneratedConcert gen = generate_concert(spec);
    const FeatureBundle f = compute_features_from_odf(gen.odf, config);
    const NoveltySet set = compute_novelties(f, config);

    PipelineConfig c1 = config;
    c1.method = Method::Combo1;
    PipelineConfig c2 = config;
    c2.method = Method::Combo2;
    const Segmentation s1 = segment_method(set, c1, f.duration_s);
    const Segmentation s2 = segment_method(set, c2, f.duration_s);

    const BoundaryMatching m1 =
        match_boundaries(s1.boundaries_s, gen.truth.boundaries_s, 5.0);
    const BoundaryMatching m2 =
        match_boundaries(s2.boundaries_s, gen.truth.boundaries_s, 5.0);
    tp1 += m1.tp();
    fp1 += m1.fp();
    tp2 += m2.tp();
    fp2 += m2.fp();
  }

  const double p1 = static_cast<double>(tp1) / (tp1 + fp1);
  const double p2 = static_cast<double>(tp2) / (tp2 + fp2);
  CHECK(p2 >= p1);
  CHECK(tp2 > 0);
}
