#include "talaseg/serial.hpp"

#include <algorithm>
#include <cmath>

#include "talaseg/kernels.hpp"

namespace talaseg {

std::vector<double> moving_median(const std::vector<double>& values, int window) {
  const int n = static_cast<int>(values.size());
  const int half = window / 2;
  std::vector<double> out(values.size(), 0.0);

#pragma omp parallel
  {
    std::vector<double> scratch;
    scratch.reserve(window + 1);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      const int lo = std::max(0, i - half);
      const int hi = std::min(n - 1, i + half);
      scratch.assign(values.begin() + lo, values.begin() + hi + 1);
      const size_t mid = scratch.size() / 2;
      std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
      double med = scratch[mid];
      if (scratch.size() % 2 == 0) {
        const double lower = *std::max_element(scratch.begin(), scratch.begin() + mid);
        med = 0.5 * (med + lower);
      }
      out[i] = med;
    }
  }
  return out;
}

namespace serial {

Matrix ssm(const Matrix& features) {
  const int n = features.rows;
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int c = 0; c < features.cols; ++c) {
        const double diff = features.at(i, c) - features.at(j, c);
        acc += diff * diff;
      }
      d.at(i, j) = std::sqrt(acc);
    }
  }
  return d;
}

Matrix rhythmogram_rows(const std::vector<double>& odf, int window, int hop, int lags) {
  const int n = static_cast<int>(odf.size());
  const int rows = n >= window ? (n - window) / hop + 1 : 0;
  Matrix out(rows, lags);

  for (int r = 0; r < rows; ++r) {
    const double* w = odf.data() + static_cast<size_t>(r) * hop;
    double mean = 0.0;
    for (int i = 0; i < window; ++i) mean += w[i];
    mean /= window;

    std::vector<double> prefix(window + 1, 0.0);
    for (int i = 0; i < window; ++i) {
      const double d = w[i] - mean;
      prefix[i + 1] = prefix[i] + d * d;
    }
    if (prefix[window] <= 1e-30) continue;

    out.at(r, 0) = 1.0;
    for (int lag = 1; lag < lags; ++lag) {
      double acc = 0.0;
      for (int i = lag; i < window; ++i) acc += (w[i] - mean) * (w[i - lag] - mean);
      const double norm =
          std::sqrt(prefix[window - lag] * (prefix[window] - prefix[lag]));
      out.at(r, lag) =
          norm > 1e-30 ? std::clamp(acc / norm * (1.0 - 2e-4 * lag), -1.0, 1.0) : 0.0;
    }
  }
  return out;
}

std::vector<double> novelty_from_ssm(const Matrix& ssm, const Matrix& kernel) {
  const int n = ssm.rows;
  const int size = kernel.rows;
  const int l = size / 2;
  std::vector<double> nf(n, 0.0);

  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int di = -l; di < l; ++di) {
      for (int dj = -l; dj < l; ++dj) {
        const int i = std::clamp(t + di, 0, n - 1);
        const int j = std::clamp(t + dj, 0, n - 1);
        acc += kernel.at(di + l, dj + l) * ssm.at(i, j);
      }
    }
    nf[t] = std::max(acc, 0.0);
  }
  return nf;
}

Matrix posterior_rows(const Matrix& rows, const Matrix& means, const Matrix& variances,
                      const std::vector<double>& weights) {
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  const int n = rows.rows;
  const int k = means.rows;
  const int dims = means.cols;
  Matrix out(n, k);

  for (int i = 0; i < n; ++i) {
    std::vector<double> lp(k);
    for (int j = 0; j < k; ++j) {
      double acc = 0.0;
      for (int d = 0; d < dims; ++d) {
        const double diff = rows.at(i, d) - means.at(j, d);
        acc += std::log(variances.at(j, d)) + diff * diff / variances.at(j, d);
      }
      lp[j] = std::log(weights[j]) - 0.5 * (dims * kLog2Pi + acc);
    }
    const double m = *std::max_element(lp.begin(), lp.end());
    double total = 0.0;
    for (double v : lp) total += std::exp(v - m);
    const double lse = m + std::log(total);
    for (int j = 0; j < k; ++j) out.at(i, j) = std::exp(lp[j] - lse);
  }
  return out;
}

std::vector<double> moving_median(const std::vector<double>& values, int window) {
  const int n = static_cast<int>(values.size());
  const int half = window / 2;
  std::vector<double> out(values.size(), 0.0);
  std::vector<double> scratch;

  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    scratch.assign(values.begin() + lo, values.begin() + hi + 1);
    const size_t mid = scratch.size() / 2;
    std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
    double med = scratch[mid];
    if (scratch.size() % 2 == 0) {
      const double lower = *std::max_element(scratch.begin(), scratch.begin() + mid);
      med = 0.5 * (med + lower);
    }
    out[i] = med;
  }
  return out;
}

}  // namespace serial
}  // namespace talaseg
