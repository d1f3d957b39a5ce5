#include "talaseg/novelty.hpp"

#include <algorithm>
#include <cmath>

#include "talaseg/error.hpp"
#include "talaseg/signal.hpp"

namespace talaseg {

namespace {

double l2_distance(const double* a, const double* b, int dims) {
  double acc = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

}  // namespace

Matrix ssm(const Matrix& features) {
  if (features.rows < 2) throw Error(Errc::invalid_argument, "need at least 2 frames");
  const int n = features.rows;
  Matrix d(n, n);

#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) {
    d.at(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double dist = l2_distance(features.row(i), features.row(j), features.cols);
      d.at(i, j) = dist;
      d.at(j, i) = dist;
    }
  }
  return d;
}

Matrix checkerboard_kernel(int half_width) {
  if (half_width < 1) throw Error(Errc::invalid_argument, "half width must be >= 1");
  const int l = half_width;
  const int size = 2 * l;
  const double sigma = l / 2.0;

  Matrix k(size, size);
  double l1 = 0.0;
  for (int i = 0; i < size; ++i) {
    const double di = i - l + 0.5;
    for (int j = 0; j < size; ++j) {
      const double dj = j - l + 0.5;
      const double taper = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      const bool homogeneous = (i < l) == (j < l);
      k.at(i, j) = homogeneous ? -taper : taper;
      l1 += taper;
    }
  }
  for (double& v : k.data) v /= l1;
  return k;
}

NoveltyCurve novelty_from_ssm(const Matrix& ssm, const Matrix& kernel, NoveltyKind kind,
                              const FeatureGrid& grid) {
  const int n = ssm.rows;
  const int size = kernel.rows;
  const int l = size / 2;
  if (size > 2 * n) throw Error(Errc::too_short, "kernel larger than matrix");

  NoveltyCurve nf;
  nf.kind = kind;
  nf.grid = grid;
  nf.values.assign(n, 0.0);

#pragma omp parallel for schedule(static)
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int di = -l; di < l; ++di) {
      const int i = std::clamp(t + di, 0, n - 1);
      const double* krow = kernel.row(di + l);
      const double* srow = ssm.row(i);
      for (int dj = -l; dj < l; ++dj) {
        const int j = std::clamp(t + dj, 0, n - 1);
        acc += krow[dj + l] * srow[j];
      }
    }
    nf.values[t] = std::max(acc, 0.0);
  }
  return nf;
}

NoveltyCurve novelty_from_features(const Matrix& features, const Matrix& kernel,
                                   NoveltyKind kind, const FeatureGrid& grid) {
  const int n = features.rows;
  const int size = kernel.rows;
  const int l = size / 2;
  if (size > 2 * n) throw Error(Errc::too_short, "kernel larger than matrix");

  // banded distances: band[i][c] = distance(i, i + c - (size-1)) clamped
  const int band_width = 2 * size - 1;
  Matrix band(n, band_width);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double* row = band.row(i);
    for (int c = 0; c < band_width; ++c) {
      const int j = std::clamp(i + c - (size - 1), 0, n - 1);
      row[c] = l2_distance(features.row(i), features.row(j), features.cols);
    }
  }

  NoveltyCurve nf;
  nf.kind = kind;
  nf.grid = grid;
  nf.values.assign(n, 0.0);

#pragma omp parallel for schedule(static)
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int di = -l; di < l; ++di) {
      const int i = std::clamp(t + di, 0, n - 1);
      const double* krow = kernel.row(di + l);
      const double* brow = band.row(i);
      for (int dj = -l; dj < l; ++dj) {
        const int j = std::clamp(t + dj, 0, n - 1);
        acc += krow[dj + l] * brow[j - i + size - 1];
      }
    }
    nf.values[t] = std::max(acc, 0.0);
  }
  return nf;
}

NoveltyCurve derivative_novelty(const std::vector<double>& curve, NoveltyKind kind,
                                const FeatureGrid& grid) {
  if (curve.size() < 2) throw Error(Errc::too_short, "need at least 2 samples");
  std::vector<double> diff(curve.size(), 0.0);
  for (size_t i = 1; i < curve.size(); ++i) diff[i] = curve[i] - curve[i - 1];

  NoveltyCurve nf;
  nf.kind = kind;
  nf.grid = grid;
  nf.values = hilbert_envelope(diff);
  return nf;
}

NoveltyCurve rhythmogram_flux(const Rhythmogram& rg) {
  if (rg.acf.rows < 2) throw Error(Errc::too_short, "need at least 2 rows");
  std::vector<double> flux(rg.acf.rows, 0.0);
  for (int i = 1; i < rg.acf.rows; ++i) {
    flux[i] = l2_distance(rg.acf.row(i), rg.acf.row(i - 1), rg.acf.cols);
  }

  NoveltyCurve nf;
  nf.kind = NoveltyKind::RhythmFlux;
  nf.grid = rg.grid;
  nf.values = hilbert_envelope(flux);
  return nf;
}

void max_normalize(std::vector<double>& values) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak <= 0.0) return;
  for (double& v : values) v /= peak;
}

NoveltySet compute_novelty_set(const AsdCurve& asd, const SteCurve& ste,
                               const Rhythmogram& rg, const PosteriorSequence& post,
                               const MfccMatrix& mfcc, int kernel_half_width) {
  const int rows = rg.grid.rows;
  if (asd.grid.rows != rows || ste.grid.rows != rows || post.grid.rows != rows ||
      mfcc.grid.rows != rows) {
    throw Error(Errc::dimension_mismatch, "feature grids are misaligned");
  }

  const Matrix kernel = checkerboard_kernel(kernel_half_width);

  NoveltySet set;
  set.of(NoveltyKind::AsdD) = derivative_novelty(asd.values, NoveltyKind::AsdD, rg.grid);
  set.of(NoveltyKind::SteD) = derivative_novelty(ste.values, NoveltyKind::SteD, rg.grid);
  set.of(NoveltyKind::RhythmFlux) = rhythmogram_flux(rg);
  set.of(NoveltyKind::SsmRhythmogram) =
      novelty_from_features(rg.acf, kernel, NoveltyKind::SsmRhythmogram, rg.grid);
  set.of(NoveltyKind::SsmPosterior) =
      novelty_from_features(post.probs, kernel, NoveltyKind::SsmPosterior, rg.grid);
  set.of(NoveltyKind::SsmMfcc) =
      novelty_from_features(mfcc.coeffs, kernel, NoveltyKind::SsmMfcc, rg.grid);

  for (auto& curve : set.curves) max_normalize(curve.values);
  return set;
}

}  // namespace talaseg
