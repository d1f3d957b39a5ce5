#pragma once

#include "talaseg/types.hpp"

namespace talaseg {

/// Short-time ACF of the ODF on the shared grid: 4 s windows, 0.5 s hop, lags
/// 0..2 s. Rows are mean-removed, lag-0 normalized; all-zero windows give
/// all-zero rows. Errors when the recording is shorter than one window.
Rhythmogram rhythmogram(const OnsetDetectionFunction& odf);

/// Onset count per 4 s window (start-inclusive, end-exclusive) divided by 4.
AsdCurve asd(const OnsetList& onsets, double duration_s);

/// Mean-square energy over 25 ms / 5 ms frames, averaged over 2 s windows
/// centered on the shared grid. Pass grid_rows >= 0 to pin the row count.
SteCurve short_time_energy(const AudioBuffer& buf, int grid_rows = -1);

/// 19 MFCCs (40-band mel filterbank to 8 kHz, DCT-II, c1..c19) plus delta and
/// delta-delta by +-2-frame regression, averaged over 2 s windows on the
/// shared grid. Requires 16 kHz input.
MfccMatrix mfcc_features(const AudioBuffer& buf, int grid_rows = -1);

}  // namespace talaseg
