#pragma once

#include <string>
#include <vector>

#include "talaseg/pipeline.hpp"

namespace talaseg {

/// Command entry points; each returns a process exit code (0 on success,
/// 2 for IO/schema failures, 3 for too-short input, 4 for degenerate input)
/// and reports errors on stderr. The CLI binary is a thin parser over these.

struct SegmentArgs {
  std::string audio_path;
  std::string out_path = "segmentation.json";
  std::string cache_dir;  // empty: $TALASEG_CACHE or <out dir>/.talaseg-cache
  PipelineConfig config;
};
int cmd_segment(const SegmentArgs& args);

struct LabelArgs {
  std::string segmentation_path;
  std::string out_path = "labeled.json";
  std::string cache_dir;
};
int cmd_label(const LabelArgs& args);

struct EvalArgs {
  std::vector<std::string> pred_paths;
  std::vector<std::string> truth_paths;
  double tolerance_s = 5.0;
  std::string out_path;  // optional JSON report
};
int cmd_eval(const EvalArgs& args);

struct SynthArgs {
  std::string spec_path;  // single-spec mode
  int batch_n = 0;        // batch mode when > 0
  uint64_t seed = 7;
  double min_minutes = 15.0;
  double max_minutes = 80.0;
  std::string render_mode = "audio";
  std::string out_dir = ".";
};
int cmd_synth(const SynthArgs& args);

struct RenderArgs {
  std::string kind;  // odf | rhythmogram | novelty | ssm
  std::string audio_path;
  std::string out_path;
  std::string ssm_feature = "rhythmogram";  // rhythmogram | posteriors | mfcc
  PipelineConfig config;
};
int cmd_render(const RenderArgs& args);

/// Cache resolution shared by segment and label.
std::string resolve_cache_dir(const std::string& explicit_dir,
                              const std::string& anchor_path);

}  // namespace talaseg
