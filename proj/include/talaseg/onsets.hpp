#pragma once

#include "talaseg/types.hpp"

namespace talaseg {

/// Half-wave-rectified spectral flux of the envelope, 20 ms Hann windows on a
/// 10 ms hop. Output length is ceil(duration / 0.010); the first frame is 0.
OnsetDetectionFunction spectral_flux_odf(const EnvelopeSignal& env);

/// Peak picking on the ODF: a frame is an onset iff it is a local maximum,
/// exceeds threshold times the 1 s moving median, and clears min_gap against
/// every already-accepted onset (larger peaks win ties, then earlier ones).
OnsetList detect_onsets(const OnsetDetectionFunction& odf, double threshold = 1.5,
                        double min_gap_s = 0.030);

}  // namespace talaseg
