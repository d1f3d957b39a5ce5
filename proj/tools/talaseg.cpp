#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "talaseg/cli.hpp"
#include "talaseg/error.hpp"

namespace {

/// --config plus individual overrides; flags win over the file.
talaseg::PipelineConfig make_config(const std::string& config_path,
                                    const std::string& method, uint64_t seed,
                                    bool seed_set) {
  talaseg::PipelineConfig config;
  if (!config_path.empty()) config = talaseg::PipelineConfig::load(config_path);
  if (!method.empty()) config.method = talaseg::method_from_name(method);
  if (seed_set) config.seed = seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabla solo concert segmentation and labeling"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, method, out, cache_dir;
  uint64_t seed = 7;
  int jobs = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "pipeline config JSON (or a previous output)");
  app.add_option("--method", method, "asd-d|ste-d|nf-rf|nf-r|nf-p|nf-m|combo1|combo2");
  app.add_option("--jobs", jobs, "max worker threads");
  app.add_option("--seed", seed, "random seed")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* segment = app.add_subcommand("segment", "segment a concert recording");
  std::string audio;
  segment->add_option("audio", audio, "input WAV")->required();
  segment->add_option("--out", out, "output JSON path");
  segment->add_option("--cache", cache_dir, "feature cache directory");

  auto* label = app.add_subcommand("label", "label the sections of a segmentation");
  std::string seg_json;
  label->add_option("segmentation", seg_json, "segmentation JSON")->required();
  label->add_option("--out", out, "output JSON path");
  label->add_option("--cache", cache_dir, "feature cache directory");

  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::vector<std::string> eval_files;
  double tolerance = 5.0;
  eval->add_option("files", eval_files, "pred truth [pred truth ...]")->required();
  eval->add_option("--tolerance", tolerance, "matching tolerance in seconds");
  eval->add_option("--out", out, "report JSON path");

  auto* synth = app.add_subcommand("synth", "generate synthetic concerts");
  std::string spec_path, out_dir = ".", render_mode = "audio";
  int batch_n = 0;
  double min_minutes = 15.0, max_minutes = 80.0;
  synth->add_option("spec", spec_path, "concert spec JSON");
  synth->add_option("--batch", batch_n, "generate a statistics-matched batch of N");
  synth->add_option("--minutes-min", min_minutes, "batch duration lower bound");
  synth->add_option("--minutes-max", max_minutes, "batch duration upper bound");
  synth->add_option("--mode", render_mode, "audio|odf");
  synth->add_option("--out-dir", out_dir, "output directory");

  auto* render = app.add_subcommand("render", "emit feature data as CSV/PGM");
  std::string kind, ssm_feature = "rhythmogram";
  render->add_option("kind", kind, "odf|rhythmogram|novelty|ssm")->required();
  render->add_option("--audio", audio, "input WAV")->required();
  render->add_option("--out", out, "output path")->required();
  render->add_option("--feature", ssm_feature, "ssm source: rhythmogram|posteriors|mfcc");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#endif

  try {
    if (segment->parsed()) {
      talaseg::SegmentArgs args;
      args.audio_path = audio;
      args.out_path = out.empty() ? "segmentation.json" : out;
      args.cache_dir = cache_dir;
      args.config = make_config(config_path, method, seed, seed_set);
      return talaseg::cmd_segment(args);
    }
    if (label->parsed()) {
      talaseg::LabelArgs args;
      args.segmentation_path = seg_json;
      args.out_path = out.empty() ? "labeled.json" : out;
      args.cache_dir = cache_dir;
      return talaseg::cmd_label(args);
    }
    if (eval->parsed()) {
      if (eval_files.size() < 2 || eval_files.size() % 2 != 0) {
        std::fprintf(stderr, "talaseg: eval expects pred/truth pairs\n");
        return 2;
      }
      talaseg::EvalArgs args;
      for (size_t i = 0; i < eval_files.size(); i += 2) {
        args.pred_paths.push_back(eval_files[i]);
        args.truth_paths.push_back(eval_files[i + 1]);
      }
      args.tolerance_s = tolerance;
      args.out_path = out;
      return talaseg::cmd_eval(args);
    }
    if (synth->parsed()) {
      talaseg::SynthArgs args;
      args.spec_path = spec_path;
      args.batch_n = batch_n;
      args.seed = seed;
      args.min_minutes = min_minutes;
      args.max_minutes = max_minutes;
      args.render_mode = render_mode;
      args.out_dir = out_dir;
      return talaseg::cmd_synth(args);
    }
    if (render->parsed()) {
      talaseg::RenderArgs args;
      args.kind = kind;
      args.audio_path = audio;
      args.out_path = out;
      args.ssm_feature = ssm_feature;
      args.config = make_config(config_path, method, seed, seed_set);
      return talaseg::cmd_render(args);
    }
  } catch (const talaseg::Error& e) {
    std::fprintf(stderr, "talaseg: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "talaseg: %s\n", e.what());
    return 2;
  }
  return 0;
}
