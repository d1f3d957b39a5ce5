#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "talaseg/eval.hpp"
#include "talaseg/types.hpp"

namespace talaseg {

struct SpeedStep {
  double at_s = 0.0;  // relative to the section start
  double factor = 1.0;
};

struct TimedSpan {
  double at_s = 0.0;  // relative to the section start
  double len_s = 0.0;
};

/// One composition (or the alap) of a synthetic concert.
struct SectionSpec {
  std::string label = "ka";  // alap | pe | ka | gtc
  double duration_s = 0.0;
  double base_density = 0.0;       // strokes per second; 0 means no strokes
  std::vector<double> pattern;     // relative inter-onset intervals
  std::vector<SpeedStep> speed_steps;
  std::vector<TimedSpan> pauses;
  std::vector<TimedSpan> recitation_inserts;
};

enum class RenderMode { Audio, Odf };

struct ConcertSpec {
  uint64_t seed = 7;
  RenderMode render_mode = RenderMode::Audio;
  std::vector<SectionSpec> sections;

  double total_duration() const;
  std::string to_json() const;
  static ConcertSpec from_json(const std::string& text);
  static ConcertSpec load(const std::string& path);
};

struct GeneratedConcert {
  AudioBuffer audio;             // audio mode
  OnsetDetectionFunction odf;    // odf mode
  RenderMode mode = RenderMode::Audio;
  GroundTruth truth;
  std::vector<double> onset_times;  // the scheduled stroke instants
};

/// Deterministic synthesis: strokes are decaying band-passed bursts (two
/// alternating classes) over a quiet harmonic bed; pauses zero the signal;
/// recitation inserts are band-limited noise without onsets. ODF mode emits
/// the ideal impulse train directly.
GeneratedConcert generate_concert(const ConcertSpec& spec);

struct BatchOptions {
  double min_minutes = 15.0;
  double max_minutes = 80.0;
  RenderMode render_mode = RenderMode::Audio;
  bool with_alap = true;
};

/// Concert specs matched to the dataset statistics: Pe/Ka/GTC duration ratios
/// near (0.3, 0.48, 0.28), composition lengths near 210 s (Ka) and 60 s (GTC),
/// concert-mean stroke densities centered on 10.62 +- 3.9.
std::vector<ConcertSpec> statistics_batch(int n, uint64_t seed,
                                          const BatchOptions& options = {});

}  // namespace talaseg
