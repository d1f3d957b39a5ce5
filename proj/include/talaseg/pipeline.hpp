#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "talaseg/posterior.hpp"
#include "talaseg/types.hpp"

namespace talaseg {

enum class Method { AsdD, SteD, NfRf, NfR, NfP, NfM, Combo1, Combo2 };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// Every tunable of the pipeline, serialized into every output JSON.
struct PipelineConfig {
  int sample_rate = 16000;
  double odf_threshold = 1.5;
  double odf_min_gap_s = 0.030;
  int kernel_half_width = 50;
  double peak_threshold = 0.2;
  double min_interval_s = 10.0;
  double coincidence_window_s = 5.0;
  int gmm_k = 5;
  double merge_asd_threshold = 3.0;
  double eval_tolerance_s = 5.0;
  uint64_t seed = 7;
  Method method = Method::Combo2;

  void validate() const;
  std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
  /// Accepts either a bare config object or an output JSON with "params".
  static PipelineConfig load(const std::string& path);
};

/// Everything the segmentation and labeling stages consume, on one grid.
struct FeatureBundle {
  double duration_s = 0.0;  // snapped to the ODF grid
  OnsetDetectionFunction odf;
  OnsetList onsets;
  AsdCurve asd;
  SteCurve ste;
  Rhythmogram rhythm;
  MfccMatrix mfcc;
  GmmModel gmm;
  PosteriorSequence posteriors;

  std::string to_json() const;
  static FeatureBundle from_json(const std::string& text);
};

/// signal -> onsets -> features -> posterior, from decoded audio.
FeatureBundle compute_features(const AudioBuffer& audio, const PipelineConfig& config);

/// Same bundle from an ideal ODF (synthetic paths); STE and MFCC are zero
/// tracks on the shared grid.
FeatureBundle compute_features_from_odf(const OnsetDetectionFunction& odf,
                                        const PipelineConfig& config);

NoveltySet compute_novelties(const FeatureBundle& features, const PipelineConfig& config);

/// Method dispatch on the novelty set; no post-processing.
Segmentation segment_method(const NoveltySet& novelties, const PipelineConfig& config,
                            double duration_s);

/// Full segmentation stage: method dispatch plus the merge post-processing.
Segmentation run_segmentation(const FeatureBundle& features, const PipelineConfig& config);

/// Content-hash cache key of the audio bytes plus the feature-relevant
/// config subset.
std::string feature_cache_key(const std::string& audio_path, const PipelineConfig& config);

/// Temp-file-then-rename write.
void atomic_write(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace talaseg
