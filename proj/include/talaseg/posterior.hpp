#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "talaseg/types.hpp"

namespace talaseg {

struct Clustering {
  std::vector<int> assignments;
  Matrix centroids;
  double wcv = 0.0;  // total within-cluster variation
};

struct ElbowDiagnostic {
  std::vector<int> m_values;
  std::vector<double> wcv;
  std::optional<int> suggested_k;
};

/// Diagonal-covariance Gaussian mixture over rhythmogram rows.
struct GmmModel {
  int k = 0;
  Matrix means;      // k x dims
  Matrix variances;  // k x dims, floored
  std::vector<double> weights;

  std::string to_json() const;
  static GmmModel from_json(const std::string& text);
};

/// Lloyd's iterations from seeded distinct-row initialization, best of 10
/// restarts by wcv. Empty clusters are reseeded to the farthest point.
Clustering kmeans(const Matrix& rows, int m, uint64_t seed);

/// wcv over a range of cluster counts plus the discrete-second-difference
/// elbow suggestion. Diagnostic only; the pipeline keeps k fixed.
ElbowDiagnostic elbow_k(const Matrix& rows, const std::vector<int>& m_range,
                        uint64_t seed);

/// EM with k-means initialization; stops when the per-frame log-likelihood
/// gain drops below 1e-6 or after 200 iterations. The per-iteration
/// log-likelihood trace is exposed for monotonicity checks.
GmmModel fit_gmm(const Matrix& rows, int k, uint64_t seed,
                 std::vector<double>* loglik_trace = nullptr);

/// Eq.-style posterior rows: softmax over log weight + log density, computed
/// in the log domain. Row-parallel.
PosteriorSequence posteriors(const GmmModel& model, const Rhythmogram& rg);

}  // namespace talaseg
