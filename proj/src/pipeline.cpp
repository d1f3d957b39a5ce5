#include "talaseg/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "talaseg/error.hpp"
#include "talaseg/features.hpp"
#include "talaseg/novelty.hpp"
#include "talaseg/onsets.hpp"
#include "talaseg/segmentation.hpp"
#include "talaseg/signal.hpp"

namespace talaseg {

const char* method_name(Method m) {
  switch (m) {
    case Method::AsdD: return "asd-d";
    case Method::SteD: return "ste-d";
    case Method::NfRf: return "nf-rf";
    case Method::NfR: return "nf-r";
    case Method::NfP: return "nf-p";
    case Method::NfM: return "nf-m";
    case Method::Combo1: return "combo1";
    case Method::Combo2: return "combo2";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::AsdD, Method::SteD, Method::NfRf, Method::NfR, Method::NfP,
                   Method::NfM, Method::Combo1, Method::Combo2}) {
    if (name == method_name(m)) return m;
  }
  throw Error(Errc::invalid_argument, "unknown method: " + name);
}

void PipelineConfig::validate() const {
  if (sample_rate <= 0 || odf_threshold <= 0.0 || odf_min_gap_s <= 0.0 ||
      kernel_half_width < 1 || peak_threshold < 0.0 || peak_threshold > 1.0 ||
      min_interval_s <= 0.0 || coincidence_window_s <= 0.0 || gmm_k < 1 ||
      merge_asd_threshold <= 0.0 || eval_tolerance_s <= 0.0) {
    throw Error(Errc::invalid_argument, "config value out of range");
  }
}

std::string PipelineConfig::to_json() const {
  nlohmann::json j;
  j["sample_rate"] = sample_rate;
  j["odf_threshold"] = odf_threshold;
  j["odf_min_gap_s"] = odf_min_gap_s;
  j["kernel_half_width"] = kernel_half_width;
  j["peak_threshold"] = peak_threshold;
  j["min_interval_s"] = min_interval_s;
  j["coincidence_window_s"] = coincidence_window_s;
  j["gmm_k"] = gmm_k;
  j["merge_asd_threshold"] = merge_asd_threshold;
  j["eval_tolerance_s"] = eval_tolerance_s;
  j["seed"] = seed;
  j["method"] = method_name(method);
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad JSON: ") + e.what());
  }
  if (j.contains("params")) j = j["params"];  // accept a previous output JSON
  PipelineConfig c;
  try {
    c.sample_rate = j.value("sample_rate", c.sample_rate);
    c.odf_threshold = j.value("odf_threshold", c.odf_threshold);
    c.odf_min_gap_s = j.value("odf_min_gap_s", c.odf_min_gap_s);
    c.kernel_half_width = j.value("kernel_half_width", c.kernel_half_width);
    c.peak_threshold = j.value("peak_threshold", c.peak_threshold);
    c.min_interval_s = j.value("min_interval_s", c.min_interval_s);
    c.coincidence_window_s = j.value("coincidence_window_s", c.coincidence_window_s);
    c.gmm_k = j.value("gmm_k", c.gmm_k);
    c.merge_asd_threshold = j.value("merge_asd_threshold", c.merge_asd_threshold);
    c.eval_tolerance_s = j.value("eval_tolerance_s", c.eval_tolerance_s);
    c.seed = j.value("seed", c.seed);
    if (j.contains("method")) {
      c.method = method_from_name(j["method"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  return from_json(read_text_file(path));
}

FeatureBundle compute_features(const AudioBuffer& audio, const PipelineConfig& config) {
  config.validate();
  FeatureBundle f;

  const AudioBuffer resampled =
      audio.sample_rate == config.sample_rate ? audio : resample(audio, config.sample_rate);

  const EnvelopeSignal env = preprocess_envelope(resampled);
  f.odf = spectral_flux_odf(env);
  f.duration_s = f.odf.values.size() / f.odf.frame_rate;
  f.onsets = detect_onsets(f.odf, config.odf_threshold, config.odf_min_gap_s);

  f.rhythm = rhythmogram(f.odf);
  f.asd = asd(f.onsets, f.duration_s);
  f.ste = short_time_energy(resampled, f.rhythm.grid.rows);
  f.mfcc = mfcc_features(resampled, f.rhythm.grid.rows);

  f.gmm = fit_gmm(f.rhythm.acf, config.gmm_k, config.seed);
  f.posteriors = posteriors(f.gmm, f.rhythm);
  return f;
}

FeatureBundle compute_features_from_odf(const OnsetDetectionFunction& odf,
                                        const PipelineConfig& config) {
  config.validate();
  FeatureBundle f;
  f.odf = odf;
  f.duration_s = odf.values.size() / odf.frame_rate;
  f.onsets = detect_onsets(f.odf, config.odf_threshold, config.odf_min_gap_s);

  f.rhythm = rhythmogram(f.odf);
  f.asd = asd(f.onsets, f.duration_s);
  f.ste.grid = f.rhythm.grid;
  f.ste.values.assign(f.rhythm.grid.rows, 0.0);
  f.mfcc.grid = f.rhythm.grid;
  f.mfcc.coeffs = Matrix(f.rhythm.grid.rows, MfccMatrix::kDims);

  f.gmm = fit_gmm(f.rhythm.acf, config.gmm_k, config.seed);
  f.posteriors = posteriors(f.gmm, f.rhythm);
  return f;
}

NoveltySet compute_novelties(const FeatureBundle& f, const PipelineConfig& config) {
  return compute_novelty_set(f.asd, f.ste, f.rhythm, f.posteriors, f.mfcc,
                             config.kernel_half_width);
}

Segmentation segment_method(const NoveltySet& novelties, const PipelineConfig& config,
                            double duration_s) {
  auto picked = [&](NoveltyKind kind) {
    return pick_peaks(novelties.of(kind), config.peak_threshold, config.min_interval_s);
  };

  switch (config.method) {
    case Method::AsdD:
      return to_segmentation(picked(NoveltyKind::AsdD), duration_s, config.min_interval_s);
    case Method::SteD:
      return to_segmentation(picked(NoveltyKind::SteD), duration_s, config.min_interval_s);
    case Method::NfRf:
      return to_segmentation(picked(NoveltyKind::RhythmFlux), duration_s,
                             config.min_interval_s);
    case Method::NfR:
      return to_segmentation(picked(NoveltyKind::SsmRhythmogram), duration_s,
                             config.min_interval_s);
    case Method::NfP:
      return to_segmentation(picked(NoveltyKind::SsmPosterior), duration_s,
                             config.min_interval_s);
    case Method::NfM:
      return to_segmentation(picked(NoveltyKind::SsmMfcc), duration_s,
                             config.min_interval_s);
    case Method::Combo1: {
      const NoveltyCurve combined =
          combo_average({novelties.of(NoveltyKind::AsdD),
                         novelties.of(NoveltyKind::SsmRhythmogram),
                         novelties.of(NoveltyKind::SsmPosterior)});
      return to_segmentation(pick_peaks(combined, config.peak_threshold,
                                        config.min_interval_s),
                             duration_s, config.min_interval_s);
    }
    case Method::Combo2:
      return fuse_majority({picked(NoveltyKind::AsdD), picked(NoveltyKind::RhythmFlux),
                            picked(NoveltyKind::SsmRhythmogram)},
                           picked(NoveltyKind::SsmPosterior), duration_s,
                           config.coincidence_window_s, config.min_interval_s);
  }
  throw Error(Errc::invalid_argument, "unknown method");
}

Segmentation run_segmentation(const FeatureBundle& features,
                              const PipelineConfig& config) {
  const NoveltySet novelties = compute_novelties(features, config);
  const Segmentation raw = segment_method(novelties, config, features.duration_s);
  return merge_segments(raw, features.asd, features.posteriors,
                        config.merge_asd_threshold);
}

namespace {

uint64_t fnv1a(const void* data, size_t len, uint64_t h) {
  const uint8_t* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string feature_cache_key(const std::string& audio_path,
                              const PipelineConfig& config) {
  std::ifstream in(audio_path, std::ios::binary);
  if (!in) throw Error(Errc::io_unreadable, "cannot open file: " + audio_path);
  uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a(buf, static_cast<size_t>(in.gcount()), h);
    if (in.eof()) break;
  }
  char subset[256];
  std::snprintf(subset, sizeof(subset), "sr=%d;thr=%.9g;gap=%.9g;k=%d;seed=%llu",
                config.sample_rate, config.odf_threshold, config.odf_min_gap_s,
                config.gmm_k, static_cast<unsigned long long>(config.seed));
  h = fnv1a(subset, std::strlen(subset), h);
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(Errc::io_unreadable, "cannot write file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io_unreadable, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_unreadable, "rename failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_unreadable, "cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.data = j.at("data").get<std::vector<double>>();
  return m;
}

}  // namespace

std::string FeatureBundle::to_json() const {
  nlohmann::json j;
  j["duration_s"] = duration_s;
  j["onsets_s"] = onsets.times;
  j["asd"] = asd.values;
  j["ste"] = ste.values;
  j["grid_rows"] = rhythm.grid.rows;
  j["mfcc"] = matrix_to_json(mfcc.coeffs);
  j["posteriors"] = matrix_to_json(posteriors.probs);
  j["gmm"] = nlohmann::json::parse(gmm.to_json());
  return j.dump();
}

FeatureBundle FeatureBundle::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad JSON: ") + e.what());
  }
  FeatureBundle f;
  try {
    f.duration_s = j.at("duration_s").get<double>();
    f.onsets.times = j.at("onsets_s").get<std::vector<double>>();
    const int rows = j.at("grid_rows").get<int>();
    const FeatureGrid grid{rows};
    f.asd.values = j.at("asd").get<std::vector<double>>();
    f.asd.grid = grid;
    f.ste.values = j.at("ste").get<std::vector<double>>();
    f.ste.grid = grid;
    f.mfcc.coeffs = matrix_from_json(j.at("mfcc"));
    f.mfcc.grid = grid;
    f.posteriors.probs = matrix_from_json(j.at("posteriors"));
    f.posteriors.grid = grid;
    f.gmm = GmmModel::from_json(j.at("gmm").dump());
    f.rhythm.grid = grid;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad schema: ") + e.what());
  }
  return f;
}

}  // namespace talaseg
