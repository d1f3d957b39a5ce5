#include "talaseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "talaseg/error.hpp"

namespace talaseg {

namespace {

SectionLabel label_from_name(const std::string& name) {
  if (name == "alap") return SectionLabel::Alap;
  if (name == "pe") return SectionLabel::Pe;
  if (name == "ka") return SectionLabel::Ka;
  if (name == "gtc") return SectionLabel::Gtc;
  throw Error(Errc::invalid_argument, "unknown section label: " + name);
}

SectionLabel label_at(const std::vector<LabeledSpan>& spans, double t) {
  for (const auto& s : spans) {
    if (t >= s.start_s && t < s.end_s) return s.label;
  }
  return spans.empty() ? SectionLabel::Pe : spans.back().label;
}

}  // namespace

BoundaryMatching match_boundaries(const std::vector<double>& pred,
                                  const std::vector<double>& truth,
                                  double tolerance_s) {
  BoundaryMatching m;
  m.n_pred = static_cast<int>(pred.size());
  m.n_truth = static_cast<int>(truth.size());
  m.tolerance_s = tolerance_s;

  // greedy over sorted predictions, each taking the earliest unmatched truth
  // within tolerance: maximum cardinality for interval matching on a line
  std::vector<bool> t_used(m.n_truth, false);
  int t_lo = 0;
  for (int p = 0; p < m.n_pred; ++p) {
    while (t_lo < m.n_truth &&
           (t_used[t_lo] || truth[t_lo] < pred[p] - tolerance_s)) {
      ++t_lo;
    }
    for (int t = t_lo; t < m.n_truth && truth[t] <= pred[p] + tolerance_s; ++t) {
      if (!t_used[t]) {
        t_used[t] = true;
        m.pairs.emplace_back(p, t);
        break;
      }
    }
  }
  return m;
}

EvalReport prf(const BoundaryMatching& matching) {
  EvalReport r;
  r.tp = matching.tp();
  r.fp = matching.fp();
  r.fn = matching.fn();
  r.tolerance_s = matching.tolerance_s;
  r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f_measure = (r.precision + r.recall) > 0.0
                    ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                    : 0.0;
  return r;
}

double frame_accuracy(const std::vector<LabeledSpan>& pred,
                      const std::vector<LabeledSpan>& truth, double pred_duration,
                      double truth_duration) {
  if (std::fabs(pred_duration - truth_duration) > 0.5) {
    throw Error(Errc::dimension_mismatch, "duration mismatch exceeds one frame");
  }
  const int n = std::max(1, static_cast<int>(std::floor(truth_duration / 0.5 + 1e-9)));
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    const double center = i * 0.5 + 0.25;
    if (label_at(pred, center) == label_at(truth, center)) ++correct;
  }
  return static_cast<double>(correct) / n;
}

std::map<std::string, EvalReport> per_section_scores(const std::vector<double>& pred,
                                                     const GroundTruth& truth,
                                                     double tolerance_s) {
  const BoundaryMatching matching = match_boundaries(pred, truth.boundaries_s, tolerance_s);

  std::map<std::string, BoundaryMatching> split;
  for (const auto& span : truth.sections) {
    split[section_name(span.label)].tolerance_s = tolerance_s;
  }

  std::vector<bool> p_matched(pred.size(), false);
  for (const auto& [p, t] : matching.pairs) p_matched[p] = true;

  // truth boundaries (and their matches) attribute to the truth section
  // containing them; unmatched predictions attribute by their own time
  for (int t = 0; t < static_cast<int>(truth.boundaries_s.size()); ++t) {
    auto& m = split[section_name(label_at(truth.sections, truth.boundaries_s[t]))];
    ++m.n_truth;
    for (const auto& [mp, mt] : matching.pairs) {
      if (mt == t) {
        m.pairs.emplace_back(mp, mt);
        ++m.n_pred;
      }
    }
  }
  for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
    if (p_matched[p]) continue;
    auto& m = split[section_name(label_at(truth.sections, pred[p]))];
    ++m.n_pred;
  }

  std::map<std::string, EvalReport> out;
  for (auto& [name, m] : split) out[name] = prf(m);
  return out;
}

std::string GroundTruth::to_json() const {
  nlohmann::json j;
  j["duration_s"] = duration_s;
  j["boundaries_s"] = boundaries_s;
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : sections) {
    spans.push_back({{"start_s", s.start_s}, {"end_s", s.end_s},
                     {"label", section_name(s.label)}});
  }
  j["sections"] = spans;
  return j.dump(2);
}

GroundTruth GroundTruth::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad JSON: ") + e.what());
  }
  GroundTruth gt;
  try {
    gt.duration_s = j.at("duration_s").get<double>();
    gt.boundaries_s = j.at("boundaries_s").get<std::vector<double>>();
    if (j.contains("sections")) {
      for (const auto& s : j["sections"]) {
        gt.sections.push_back({s.at("start_s").get<double>(),
                               s.at("end_s").get<double>(),
                               label_from_name(s.at("label").get<std::string>())});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format_unsupported, std::string("bad schema: ") + e.what());
  }
  if (!std::is_sorted(gt.boundaries_s.begin(), gt.boundaries_s.end())) {
    throw Error(Errc::format_unsupported, "boundaries must be increasing");
  }
  return gt;
}

GroundTruth GroundTruth::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_unreadable, "cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_measure"] = r.f_measure;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["tolerance_s"] = r.tolerance_s;
  if (r.frame_accuracy >= 0.0) j["frame_accuracy"] = r.frame_accuracy;
  if (!r.per_section.empty()) {
    nlohmann::json per;
    for (const auto& [name, sub] : r.per_section) per[name] = report_to_json(sub);
    j["per_section"] = per;
  }
  return j;
}

}  // namespace

std::string EvalReport::to_json() const { return report_to_json(*this).dump(2); }

std::string EvalReport::to_text() const {
  char line[256];
  std::string out;
  out += "section     precision  recall     f-measure  tp   fp   fn\n";
  std::snprintf(line, sizeof(line), "%-11s %-10.3f %-10.3f %-10.3f %-4d %-4d %-4d\n",
                "all", precision, recall, f_measure, tp, fp, fn);
  out += line;
  for (const auto& [name, r] : per_section) {
    std::snprintf(line, sizeof(line), "%-11s %-10.3f %-10.3f %-10.3f %-4d %-4d %-4d\n",
                  name.c_str(), r.precision, r.recall, r.f_measure, r.tp, r.fp, r.fn);
    out += line;
  }
  if (frame_accuracy >= 0.0) {
    std::snprintf(line, sizeof(line), "frame accuracy: %.3f\n", frame_accuracy);
    out += line;
  }
  return out;
}

}  // namespace talaseg
