#include "talaseg/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "talaseg/error.hpp"
#include "talaseg/rng.hpp"

namespace talaseg {

namespace {

constexpr double kVarianceFloor = 1e-6;
constexpr double kWeightFloor = 1e-6;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr int kKmeansMaxIters = 300;
constexpr int kKmeansRestarts = 10;
constexpr int kEmMaxIters = 200;
constexpr double kEmTolPerFrame = 1e-6;

double sq_distance(const double* a, const double* b, int dims) {
  double acc = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return acc;
}

int count_distinct_rows(const Matrix& rows) {
  std::set<std::vector<double>> seen;
  for (int i = 0; i < rows.rows; ++i) {
    seen.emplace(rows.row(i), rows.row(i) + rows.cols);
  }
  return static_cast<int>(seen.size());
}

Clustering kmeans_once(const Matrix& rows, int m, Rng& rng) {
  const int n = rows.rows;
  const int dims = rows.cols;

  // init: m distinct rows drawn without replacement
  Clustering c;
  c.centroids = Matrix(m, dims);
  std::set<std::vector<double>> chosen;
  int placed = 0;
  while (placed < m) {
    const int idx = rng.uniform_int(0, n - 1);
    std::vector<double> candidate(rows.row(idx), rows.row(idx) + dims);
    if (chosen.insert(candidate).second) {
      std::copy(candidate.begin(), candidate.end(), c.centroids.row(placed));
      ++placed;
    }
  }

  c.assignments.assign(n, -1);
  std::vector<int> counts(m, 0);

  for (int iter = 0; iter < kKmeansMaxIters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_distance(rows.row(i), c.centroids.row(0), dims);
      for (int j = 1; j < m; ++j) {
        const double d = sq_distance(rows.row(i), c.centroids.row(j), dims);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (c.assignments[i] != best) {
        c.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::fill(counts.begin(), counts.end(), 0);
    std::fill(c.centroids.data.begin(), c.centroids.data.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const int a = c.assignments[i];
      ++counts[a];
      double* cent = c.centroids.row(a);
      const double* r = rows.row(i);
      for (int d = 0; d < dims; ++d) cent[d] += r[d];
    }
    for (int j = 0; j < m; ++j) {
      if (counts[j] > 0) {
        double* cent = c.centroids.row(j);
        for (int d = 0; d < dims; ++d) cent[d] /= counts[j];
      } else {
        // reseed the empty cluster to the point farthest from its centroid
        int far_i = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d =
              sq_distance(rows.row(i), c.centroids.row(c.assignments[i]), dims);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        std::copy(rows.row(far_i), rows.row(far_i) + dims, c.centroids.row(j));
      }
    }
  }

  c.wcv = 0.0;
  for (int i = 0; i < n; ++i) {
    c.wcv += sq_distance(rows.row(i), c.centroids.row(c.assignments[i]), dims);
  }
  return c;
}

}  // namespace

Clustering kmeans(const Matrix& rows, int m, uint64_t seed) {
  if (m < 1) throw Error(Errc::invalid_argument, "cluster count must be >= 1");
  if (rows.rows < 1) throw Error(Errc::invalid_argument, "no rows to cluster");
  if (m > count_distinct_rows(rows)) {
    throw Error(Errc::invalid_argument, "more clusters than distinct rows");
  }

  Rng master(seed);
  Clustering best;
  best.wcv = std::numeric_limits<double>::infinity();
  for (int r = 0; r < kKmeansRestarts; ++r) {
    Rng rng(master.derive_seed());
    Clustering c = kmeans_once(rows, m, rng);
    if (c.wcv < best.wcv) best = std::move(c);
  }
  return best;
}

ElbowDiagnostic elbow_k(const Matrix& rows, const std::vector<int>& m_range,
                        uint64_t seed) {
  if (m_range.empty() || !std::is_sorted(m_range.begin(), m_range.end())) {
    throw Error(Errc::invalid_argument, "m_range must be nonempty ascending");
  }
  ElbowDiagnostic diag;
  for (int m : m_range) {
    diag.m_values.push_back(m);
    diag.wcv.push_back(kmeans(rows, m, seed).wcv);
  }
  // elbow: largest discrete second difference
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 1; i + 1 < diag.wcv.size(); ++i) {
    const double curvature = diag.wcv[i - 1] - 2.0 * diag.wcv[i] + diag.wcv[i + 1];
    if (curvature > best) {
      best = curvature;
      diag.suggested_k = diag.m_values[i];
    }
  }
  return diag;
}

namespace {

/// log N(x | mean, diag variance)
double log_density(const double* x, const double* mean, const double* var, int dims) {
  double acc = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double diff = x[d] - mean[d];
    acc += std::log(var[d]) + diff * diff / var[d];
  }
  return -0.5 * (dims * kLog2Pi + acc);
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

GmmModel fit_gmm(const Matrix& rows, int k, uint64_t seed,
                 std::vector<double>* loglik_trace) {
  if (rows.rows < 10 * k) {
    throw Error(Errc::degenerate, "too few rows to fit the mixture");
  }
  const int n = rows.rows;
  const int dims = rows.cols;

  const Clustering init = kmeans(rows, k, seed);

  GmmModel model;
  model.k = k;
  model.means = init.centroids;
  model.variances = Matrix(k, dims);
  model.weights.assign(k, 0.0);

  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) ++counts[init.assignments[i]];
  for (int i = 0; i < n; ++i) {
    const int a = init.assignments[i];
    const double* r = rows.row(i);
    const double* mean = model.means.row(a);
    double* var = model.variances.row(a);
    for (int d = 0; d < dims; ++d) {
      const double diff = r[d] - mean[d];
      var[d] += diff * diff;
    }
  }
  for (int j = 0; j < k; ++j) {
    model.weights[j] = static_cast<double>(counts[j]) / n;
    double* var = model.variances.row(j);
    for (int d = 0; d < dims; ++d) {
      var[d] = std::max(counts[j] > 0 ? var[d] / counts[j] : kVarianceFloor,
                        kVarianceFloor);
    }
  }

  Matrix resp(n, k);
  std::vector<double> log_w(k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  bool reseeded = false;

  for (int iter = 0; iter < kEmMaxIters; ++iter) {
    for (int j = 0; j < k; ++j) {
      log_w[j] = model.weights[j] > 0.0 ? std::log(model.weights[j])
                                        : -std::numeric_limits<double>::infinity();
    }

    // E step (single-threaded: the fit must be deterministic per concert)
    double ll = 0.0;
    std::vector<double> lp(k);
    for (int i = 0; i < n; ++i) {
      const double* x = rows.row(i);
      for (int j = 0; j < k; ++j) {
        lp[j] = log_w[j] +
                log_density(x, model.means.row(j), model.variances.row(j), dims);
      }
      const double lse = log_sum_exp(lp);
      ll += lse;
      double* r = resp.row(i);
      for (int j = 0; j < k; ++j) r[j] = std::exp(lp[j] - lse);
    }
    if (loglik_trace) loglik_trace->push_back(ll);

    // M step
    std::vector<double> nk(k, 0.0);
    for (int i = 0; i < n; ++i) {
      const double* r = resp.row(i);
      for (int j = 0; j < k; ++j) nk[j] += r[j];
    }

    bool degenerate = false;
    for (int j = 0; j < k; ++j) {
      if (nk[j] / n < kWeightFloor) degenerate = true;
    }
    if (degenerate) {
      if (reseeded) throw Error(Errc::degenerate, "degenerate mixture");
      reseeded = true;
      // restart the fit from a different k-means draw
      const Clustering retry = kmeans(rows, k, seed + 1);
      model.means = retry.centroids;
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < n; ++i) ++counts[retry.assignments[i]];
      std::fill(model.variances.data.begin(), model.variances.data.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        const int a = retry.assignments[i];
        const double* r = rows.row(i);
        const double* mean = model.means.row(a);
        double* var = model.variances.row(a);
        for (int d = 0; d < dims; ++d) {
          const double diff = r[d] - mean[d];
          var[d] += diff * diff;
        }
      }
      for (int j = 0; j < k; ++j) {
        model.weights[j] = static_cast<double>(counts[j]) / n;
        double* var = model.variances.row(j);
        for (int d = 0; d < dims; ++d) {
          var[d] = std::max(counts[j] > 0 ? var[d] / counts[j] : kVarianceFloor,
                            kVarianceFloor);
        }
      }
      prev_ll = -std::numeric_limits<double>::infinity();
      if (loglik_trace) loglik_trace->clear();
      continue;
    }

    std::fill(model.means.data.begin(), model.means.data.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double* x = rows.row(i);
      const double* r = resp.row(i);
      for (int j = 0; j < k; ++j) {
        double* mean = model.means.row(j);
        for (int d = 0; d < dims; ++d) mean[d] += r[j] * x[d];
      }
    }
    for (int j = 0; j < k; ++j) {
      double* mean = model.means.row(j);
      for (int d = 0; d < dims; ++d) mean[d] /= nk[j];
    }

    std::fill(model.variances.data.begin(), model.variances.data.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double* x = rows.row(i);
      const double* r = resp.row(i);
      for (int j = 0; j < k; ++j) {
        const double* mean = model.means.row(j);
        double* var = model.variances.row(j);
        for (int d = 0; d < dims; ++d) {
          const double diff = x[d] - mean[d];
          var[d] += r[j] * diff * diff;
        }
      }
    }
    for (int j = 0; j < k; ++j) {
      model.weights[j] = nk[j] / n;
      double* var = model.variances.row(j);
      for (int d = 0; d < dims; ++d) var[d] = std::max(var[d] / nk[j], kVarianceFloor);
    }

    if (ll - prev_ll < kEmTolPerFrame * n && iter > 0) break;
    prev_ll = ll;
  }
  return model;
}

PosteriorSequence posteriors(const GmmModel& model, const Rhythmogram& rg) {
  if (model.means.cols != rg.acf.cols) {
    throw Error(Errc::dimension_mismatch, "model dimensionality does not match lags");
  }
  const int n = rg.acf.rows;
  const int k = model.k;

  PosteriorSequence seq;
  seq.grid = rg.grid;
  seq.probs = Matrix(n, k);

  std::vector<double> log_w(k);
  for (int j = 0; j < k; ++j) {
    log_w[j] = model.weights[j] > 0.0 ? std::log(model.weights[j])
                                      : -std::numeric_limits<double>::infinity();
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    std::vector<double> lp(k);
    const double* x = rg.acf.row(i);
    for (int j = 0; j < k; ++j) {
      lp[j] = log_w[j] + log_density(x, model.means.row(j), model.variances.row(j),
                                     model.means.cols);
    }
    const double lse = log_sum_exp(lp);
    double* r = seq.probs.row(i);
    for (int j = 0; j < k; ++j) r[j] = std::exp(lp[j] - lse);
  }
  return seq;
}

std::string GmmModel::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["weights"] = weights;
  nlohmann::json means_j = nlohmann::json::array();
  nlohmann::json vars_j = nlohmann::json::array();
  for (int i = 0; i < k; ++i) {
    means_j.push_back(std::vector<double>(means.row(i), means.row(i) + means.cols));
    vars_j.push_back(
        std::vector<double>(variances.row(i), variances.row(i) + variances.cols));
  }
  j["means"] = means_j;
  j["variances"] = vars_j;
  return j.dump(2);
}

GmmModel GmmModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GmmModel m;
  m.k = j.at("k").get<int>();
  m.weights = j.at("weights").get<std::vector<double>>();
  const auto& means_j = j.at("means");
  const auto& vars_j = j.at("variances");
  const int dims = means_j.empty() ? 0 : static_cast<int>(means_j[0].size());
  m.means = Matrix(m.k, dims);
  m.variances = Matrix(m.k, dims);
  for (int i = 0; i < m.k; ++i) {
    for (int d = 0; d < dims; ++d) {
      m.means.at(i, d) = means_j[i][d].get<double>();
      m.variances.at(i, d) = vars_j[i][d].get<double>();
    }
  }
  return m;
}

}  // namespace talaseg
