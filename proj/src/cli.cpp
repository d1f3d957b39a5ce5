#include "talaseg/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <nlohmann/json.hpp>

#include "talaseg/error.hpp"
#include "talaseg/eval.hpp"
#include "talaseg/labeling.hpp"
#include "talaseg/novelty.hpp"
#include "talaseg/onsets.hpp"
#include "talaseg/render.hpp"
#include "talaseg/signal.hpp"
#include "talaseg/synthesis.hpp"
#include "talaseg/wav.hpp"

namespace talaseg {

namespace fs = std::filesystem;

namespace {

int report_error(const Error& e) {
  std::cerr << "talaseg: " << e.what() << "\n";
  return e.exit_code();
}

std::string sibling_path(const std::string& path, const std::string& new_ext) {
  fs::path p(path);
  p.replace_extension(new_ext);
  return p.string();
}

std::string format_seconds(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

nlohmann::json segmentation_json(const Segmentation& seg, const PipelineConfig& config,
                                 const std::string& features_key,
                                 const std::string& input_path) {
  nlohmann::json j;
  j["duration_s"] = seg.duration_s;
  j["boundaries_s"] = seg.boundaries_s;
  j["method"] = method_name(config.method);
  j["params"] = nlohmann::json::parse(config.to_json());
  j["features_key"] = features_key;
  j["input"] = input_path;
  return j;
}

std::string segmentation_csv(const Segmentation& seg) {
  std::string out = "start_s,end_s\n";
  for (int i = 0; i < seg.segment_count(); ++i) {
    out += format_seconds(seg.segment_start(i));
    out += ',';
    out += format_seconds(seg.segment_end(i));
    out += '\n';
  }
  return out;
}

}  // namespace

std::string resolve_cache_dir(const std::string& explicit_dir,
                              const std::string& anchor_path) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("TALASEG_CACHE"); env && *env) return env;
  fs::path anchor(anchor_path);
  return (anchor.has_parent_path() ? anchor.parent_path() : fs::path("."))
             .append(".talaseg-cache")
             .string();
}

int cmd_segment(const SegmentArgs& args) {
  try {
    args.config.validate();
    const std::string key = feature_cache_key(args.audio_path, args.config);

    const AudioBuffer audio = load_audio(args.audio_path);
    const FeatureBundle features = compute_features(audio, args.config);
    const Segmentation seg = run_segmentation(features, args.config);

    const std::string cache_dir = resolve_cache_dir(args.cache_dir, args.out_path);
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    atomic_write((fs::path(cache_dir) / (key + ".features.json")).string(),
                 features.to_json());

    nlohmann::json j = segmentation_json(seg, args.config, key, args.audio_path);
    atomic_write(args.out_path, j.dump(2) + "\n");
    atomic_write(sibling_path(args.out_path, ".csv"), segmentation_csv(seg));
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

int cmd_label(const LabelArgs& args) {
  try {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(args.segmentation_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::format_unsupported, std::string("bad JSON: ") + e.what());
    }
    if (j.contains("sections")) {
      throw Error(Errc::degenerate, "input is already labeled");
    }
    Segmentation seg;
    try {
      seg.duration_s = j.at("duration_s").get<double>();
      seg.boundaries_s = j.at("boundaries_s").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::format_unsupported, std::string("bad schema: ") + e.what());
    }
    if (seg.boundaries_s.empty()) {
      throw Error(Errc::degenerate, "empty segmentation");
    }
    if (!j.contains("features_key")) {
      throw Error(Errc::format_unsupported, "segmentation has no features_key");
    }

    const std::string cache_dir =
        resolve_cache_dir(args.cache_dir, args.segmentation_path);
    const std::string features_path =
        (fs::path(cache_dir) / (j["features_key"].get<std::string>() + ".features.json"))
            .string();
    const FeatureBundle features = FeatureBundle::from_json(read_text_file(features_path));

    const SectionLabels labels =
        label_concert(seg, features.onsets, features.mfcc, features.asd);

    nlohmann::json spans = nlohmann::json::array();
    for (const auto& span : to_spans(seg, labels)) {
      spans.push_back({{"start_s", span.start_s},
                       {"end_s", span.end_s},
                       {"label", section_name(span.label)}});
    }
    j["sections"] = spans;
    j["alap_end_s"] = labels.alap_end;
    j["pe_ka_s"] = labels.pe_ka;
    j["ka_gtc_s"] = labels.ka_gtc;
    atomic_write(args.out_path, j.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

int cmd_eval(const EvalArgs& args) {
  try {
    if (args.pred_paths.empty() || args.pred_paths.size() != args.truth_paths.size()) {
      throw Error(Errc::invalid_argument, "eval needs matching prediction/truth pairs");
    }

    nlohmann::json out;
    out["concerts"] = nlohmann::json::array();
    double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0, sum_acc = 0.0;
    int acc_count = 0;

    for (size_t i = 0; i < args.pred_paths.size(); ++i) {
      const GroundTruth pred = GroundTruth::load(args.pred_paths[i]);
      const GroundTruth truth = GroundTruth::load(args.truth_paths[i]);

      EvalReport report =
          prf(match_boundaries(pred.boundaries_s, truth.boundaries_s, args.tolerance_s));
      if (!pred.sections.empty() && !truth.sections.empty()) {
        report.frame_accuracy = frame_accuracy(pred.sections, truth.sections,
                                               pred.duration_s, truth.duration_s);
        report.per_section =
            per_section_scores(pred.boundaries_s, truth, args.tolerance_s);
        sum_acc += report.frame_accuracy;
        ++acc_count;
      }
      sum_p += report.precision;
      sum_r += report.recall;
      sum_f += report.f_measure;

      std::cout << args.pred_paths[i] << "\n" << report.to_text();
      nlohmann::json cj = nlohmann::json::parse(report.to_json());
      cj["pred"] = args.pred_paths[i];
      cj["truth"] = args.truth_paths[i];
      out["concerts"].push_back(cj);
    }

    const double n = static_cast<double>(args.pred_paths.size());
    nlohmann::json mean;
    mean["precision"] = sum_p / n;
    mean["recall"] = sum_r / n;
    mean["f_measure"] = sum_f / n;
    if (acc_count > 0) mean["frame_accuracy"] = sum_acc / acc_count;
    out["mean"] = mean;
    if (args.pred_paths.size() > 1) {
      std::printf("mean        %-10.3f %-10.3f %-10.3f\n", sum_p / n, sum_r / n,
                  sum_f / n);
    }
    if (!args.out_path.empty()) atomic_write(args.out_path, out.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

namespace {

void write_concert(const GeneratedConcert& concert, const ConcertSpec& spec,
                   const fs::path& dir, const std::string& stem) {
  if (concert.mode == RenderMode::Audio) {
    write_wav((dir / (stem + ".wav")).string(), concert.audio);
  } else {
    atomic_write((dir / (stem + ".odf.csv")).string(), odf_csv(concert.odf));
  }
  atomic_write((dir / (stem + ".truth.json")).string(), concert.truth.to_json() + "\n");
  atomic_write((dir / (stem + ".spec.json")).string(), spec.to_json() + "\n");
}

}  // namespace

int cmd_synth(const SynthArgs& args) {
  try {
    fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);

    if (args.batch_n > 0) {
      BatchOptions options;
      options.min_minutes = args.min_minutes;
      options.max_minutes = args.max_minutes;
      options.render_mode =
          args.render_mode == "odf" ? RenderMode::Odf : RenderMode::Audio;
      const std::vector<ConcertSpec> batch =
          statistics_batch(args.batch_n, args.seed, options);
      for (size_t i = 0; i < batch.size(); ++i) {
        char stem[64];
        std::snprintf(stem, sizeof(stem), "concert_%llu_%03zu",
                      static_cast<unsigned long long>(args.seed), i);
        write_concert(generate_concert(batch[i]), batch[i], dir, stem);
      }
      return 0;
    }

    if (args.spec_path.empty()) {
      throw Error(Errc::invalid_argument, "need a spec file or --batch");
    }
    const ConcertSpec spec = ConcertSpec::load(args.spec_path);
    const std::string stem = fs::path(args.spec_path).stem().string();
    write_concert(generate_concert(spec), spec, dir, stem);
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

int cmd_render(const RenderArgs& args) {
  try {
    args.config.validate();
    const AudioBuffer audio = load_audio(args.audio_path);

    if (args.kind == "odf") {
      const FeatureBundle f = [&] {
        FeatureBundle out;
        const AudioBuffer resampled = audio.sample_rate == args.config.sample_rate
                                          ? audio
                                          : resample(audio, args.config.sample_rate);
        out.odf = spectral_flux_odf(preprocess_envelope(resampled));
        return out;
      }();
      atomic_write(args.out_path, odf_csv(f.odf));
      return 0;
    }

    const FeatureBundle features = compute_features(audio, args.config);
    if (args.kind == "rhythmogram") {
      atomic_write(args.out_path, rhythmogram_csv(features.rhythm));
      atomic_write(sibling_path(args.out_path, ".pgm"),
                   rhythmogram_pgm(features.rhythm));
    } else if (args.kind == "novelty") {
      atomic_write(args.out_path,
                   novelty_csv(compute_novelties(features, args.config)));
    } else if (args.kind == "ssm") {
      const Matrix* source = &features.rhythm.acf;
      if (args.ssm_feature == "posteriors") {
        source = &features.posteriors.probs;
      } else if (args.ssm_feature == "mfcc") {
        source = &features.mfcc.coeffs;
      } else if (args.ssm_feature != "rhythmogram") {
        throw Error(Errc::invalid_argument, "unknown ssm feature: " + args.ssm_feature);
      }
      atomic_write(args.out_path, ssm_pgm(ssm(*source)));
    } else {
      throw Error(Errc::invalid_argument, "unknown render kind: " + args.kind);
    }
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

}  // namespace talaseg
