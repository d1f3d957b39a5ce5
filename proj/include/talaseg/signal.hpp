#pragma once

#include <vector>

#include "talaseg/types.hpp"

namespace talaseg {

/// Band-limited windowed-sinc resampling; identity when rates match.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

/// Per-frame linear-prediction residual (autocorrelation method,
/// Levinson-Durbin), assembled by Hann overlap-add. Output length equals the
/// input length. All-zero frames pass through unchanged.
std::vector<double> lp_residual(const AudioBuffer& buf, int order = 10,
                                double frame_s = 0.030, double hop_s = 0.015);

/// Magnitude of the analytic signal, exact arbitrary-length transform.
std::vector<double> hilbert_envelope(const std::vector<double>& x);

/// Block-wise envelope for long signals: power-of-two blocks around 4 s at the
/// given rate, cross-faded over the overlap. Short inputs take the exact path.
EnvelopeSignal hilbert_envelope_blocked(const std::vector<double>& x, int sample_rate);

/// LP residual followed by the blocked Hilbert envelope: the enhanced
/// envelope the onset detector runs on.
EnvelopeSignal preprocess_envelope(const AudioBuffer& buf);

}  // namespace talaseg
