#pragma once

#include <vector>

#include "talaseg/types.hpp"

namespace talaseg {

/// Local maxima above threshold, accepted greedily in descending score order
/// subject to the minimum inter-peak interval. Curve must be max-normalized.
BoundaryCandidates pick_peaks(const NoveltyCurve& nf, double threshold,
                              double min_interval_s = 10.0);

/// Combo-1: elementwise mean of exactly {ASD-D, NF-R, NF-P}, re-normalized.
NoveltyCurve combo_average(const std::vector<NoveltyCurve>& nfs);

/// Combo-2: NF-P peaks accepted when at least two of {ASD-D, NF-RF, NF-R}
/// have a peak within the coincidence window.
Segmentation fuse_majority(const std::vector<BoundaryCandidates>& candidates,
                           const BoundaryCandidates& reference, double duration_s,
                           double coincidence_window_s = 5.0,
                           double min_interval_s = 10.0);

/// Candidate list to segmentation: drops boundaries closer than the minimum
/// segment length to either end or to each other.
Segmentation to_segmentation(const BoundaryCandidates& candidates, double duration_s,
                             double min_segment_s = 10.0);

/// Post-processing merge: adjacent segments whose mean-ASD difference is under
/// the threshold AND whose modal posterior class agrees lose their shared
/// boundary; repeats to fixpoint.
Segmentation merge_segments(const Segmentation& seg, const AsdCurve& asd,
                            const PosteriorSequence& post,
                            double asd_threshold = 3.0);

}  // namespace talaseg
