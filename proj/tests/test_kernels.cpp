#include <doctest.h>

#include "talaseg/features.hpp"
#include "talaseg/kernels.hpp"
#include "talaseg/novelty.hpp"
#include "talaseg/posterior.hpp"
#include "talaseg/rng.hpp"
#include "talaseg/serial.hpp"

using namespace talaseg;

// The OpenMP kernels parallelize over independent output elements, so they
// must agree with the serial references bit for bit.

TEST_CASE("parallel ssm equals the serial reference") {
  Rng rng(1);
  Matrix f(150, 12);
  for (double& v : f.data) v = rng.uniform(-1.0, 1.0);
  CHECK(ssm(f).data == serial::ssm(f).data);
}

TEST_CASE("parallel rhythmogram equals the serial reference") {
  Rng rng(2);
  OnsetDetectionFunction odf;
  odf.values.assign(3000, 0.0);
  for (double& v : odf.values) v = rng.uniform() < 0.1 ? rng.uniform(0.5, 1.5) : 0.0;

  const Rhythmogram rg = rhythmogram(odf);
  const Matrix ref = serial::rhythmogram_rows(odf.values, 400, 50, 201);
  CHECK(rg.acf.data == ref.data);
}

TEST_CASE("parallel novelty convolution equals the serial reference") {
  Rng rng(3);
  Matrix f(120, 6);
  for (double& v : f.data) v = rng.uniform(0.0, 1.0);
  const Matrix d = ssm(f);
  const Matrix kernel = checkerboard_kernel(15);

  const NoveltyCurve nf =
      novelty_from_ssm(d, kernel, NoveltyKind::SsmRhythmogram, FeatureGrid{120});
  CHECK(nf.values == serial::novelty_from_ssm(d, kernel));
}

TEST_CASE("parallel posteriors equal the serial reference") {
  Rng rng(4);
  const int k = 5, dims = 201, n = 200;
  GmmModel model;
  model.k = k;
  model.means = Matrix(k, dims);
  model.variances = Matrix(k, dims);
  for (double& v : model.means.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : model.variances.data) v = rng.uniform(0.01, 0.5);
  model.weights.assign(k, 1.0 / k);

  Rhythmogram rg;
  rg.acf = Matrix(n, dims);
  rg.grid = FeatureGrid{n};
  for (double& v : rg.acf.data) v = rng.uniform(-1.0, 1.0);

  const PosteriorSequence seq = posteriors(model, rg);
  const Matrix ref =
      serial::posterior_rows(rg.acf, model.means, model.variances, model.weights);
  CHECK(seq.probs.data == ref.data);
}

TEST_CASE("parallel moving median equals the serial reference") {
  Rng rng(5);
  std::vector<double> v(5000);
  for (double& x : v) x = rng.uniform(0.0, 10.0);
  CHECK(moving_median(v, 101) == serial::moving_median(v, 101));
  CHECK(moving_median(v, 100) == serial::moving_median(v, 100));
}
