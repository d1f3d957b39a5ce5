#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "talaseg/types.hpp"

namespace talaseg {

struct GroundTruth {
  double duration_s = 0.0;
  std::vector<double> boundaries_s;
  std::vector<LabeledSpan> sections;

  std::string to_json() const;
  static GroundTruth from_json(const std::string& text);
  static GroundTruth load(const std::string& path);
};

struct BoundaryMatching {
  std::vector<std::pair<int, int>> pairs;  // (pred index, truth index)
  int n_pred = 0;
  int n_truth = 0;
  double tolerance_s = 5.0;

  int tp() const { return static_cast<int>(pairs.size()); }
  int fp() const { return n_pred - tp(); }
  int fn() const { return n_truth - tp(); }
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  int tp = 0, fp = 0, fn = 0;
  double tolerance_s = 5.0;
  double frame_accuracy = -1.0;  // < 0 when not evaluated
  std::map<std::string, EvalReport> per_section;

  std::string to_json() const;
  std::string to_text() const;
};

/// Maximum-cardinality one-to-one matching within tolerance, greedy on
/// distance-sorted pairs. Each truth boundary matches at most once.
BoundaryMatching match_boundaries(const std::vector<double>& pred,
                                  const std::vector<double>& truth,
                                  double tolerance_s = 5.0);

EvalReport prf(const BoundaryMatching& matching);

/// Fraction of 0.5 s frames whose predicted section label equals truth.
double frame_accuracy(const std::vector<LabeledSpan>& pred,
                      const std::vector<LabeledSpan>& truth, double pred_duration,
                      double truth_duration);

/// Boundary P/R/F split by the truth section containing each boundary
/// (section edges attribute to the later section).
std::map<std::string, EvalReport> per_section_scores(const std::vector<double>& pred,
                                                     const GroundTruth& truth,
                                                     double tolerance_s = 5.0);

}  // namespace talaseg
