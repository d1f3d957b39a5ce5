#pragma once

#include <utility>

#include "talaseg/types.hpp"

namespace talaseg {

/// End of the initial run of alap segments: low onset density plus a timbre
/// check against the recording's percussive MFCC statistics. 0 when the
/// concert opens with strokes.
double detect_alap(const Segmentation& seg, const OnsetList& onsets,
                   const MfccMatrix& mfcc);

/// Ratio-based initialization of the Pe-Ka and Ka-GTC boundaries on the
/// post-alap span (0.3 and 0.72 of its length).
std::pair<double, double> init_section_boundaries(double duration_s, double alap_end);

/// Shift Ka-GTC to the start of the earliest run of >= 2 consecutive
/// sub-50 s segments that contains or follows ka_gtc0 - 0.25 * duration;
/// otherwise snap to the nearest segment boundary.
double refine_ka_gtc(const Segmentation& seg, double ka_gtc0, double alap_end);

/// Move Pe-Ka to the nearest segment boundary (within +-0.15 * duration of
/// the initial point) where the mean ASD drops by at least 3 strokes/s across
/// 10 s; otherwise snap to the nearest boundary.
double refine_pe_ka(const Segmentation& seg, const AsdCurve& asd, double pe_ka0,
                    double alap_end);

/// Assign each segment the label of the region containing its midpoint.
/// Errors when the boundary ordering is violated.
SectionLabels label_sections(const Segmentation& seg, double alap_end, double pe_ka,
                             double ka_gtc);

/// The full rule system. Errors with "no percussive content" on degenerate
/// recordings; resolves rare refinement order inversions by clamping
/// pe_ka to ka_gtc.
SectionLabels label_concert(const Segmentation& seg, const OnsetList& onsets,
                            const MfccMatrix& mfcc, const AsdCurve& asd);

/// Labeled spans (contiguous same-label runs) for serialization and scoring.
std::vector<LabeledSpan> to_spans(const Segmentation& seg, const SectionLabels& labels);

}  // namespace talaseg
