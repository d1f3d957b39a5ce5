// Timing comparison of the OpenMP kernels against their serial references.
// Build and run: ./build/bench/bench_kernels [rows]

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "talaseg/features.hpp"
#include "talaseg/kernels.hpp"
#include "talaseg/novelty.hpp"
#include "talaseg/posterior.hpp"
#include "talaseg/rng.hpp"
#include "talaseg/serial.hpp"

using namespace talaseg;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_it(F&& f) {
  const double t0 = now_s();
  f();
  return now_s() - t0;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-22s serial %8.3f s   openmp %8.3f s   speedup %.2fx\n", name,
              serial_s, parallel_s, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  const int rows = argc > 1 ? std::atoi(argv[1]) : 1800;
  const int dims = 201;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  Rng rng(42);
  Matrix features(rows, dims);
  for (double& v : features.data) v = rng.uniform(-1.0, 1.0);

  OnsetDetectionFunction odf;
  odf.values.resize(static_cast<size_t>(rows) * 50 + 400);
  for (double& v : odf.values) v = rng.uniform() < 0.1 ? 1.0 : 0.0;

  Matrix full_ssm;
  report("ssm",
         time_it([&] { full_ssm = serial::ssm(features); }),
         time_it([&] { ssm(features); }));

  report("rhythmogram",
         time_it([&] { serial::rhythmogram_rows(odf.values, 400, 50, 201); }),
         time_it([&] { rhythmogram(odf); }));

  const Matrix kernel = checkerboard_kernel(50);
  const FeatureGrid grid{rows};
  report("novelty convolution",
         time_it([&] { serial::novelty_from_ssm(full_ssm, kernel); }),
         time_it([&] {
           novelty_from_ssm(full_ssm, kernel, NoveltyKind::SsmRhythmogram, grid);
         }));

  const int k = 5;
  Matrix means(k, dims), variances(k, dims);
  std::vector<double> weights(k, 1.0 / k);
  for (double& v : means.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : variances.data) v = rng.uniform(0.05, 0.5);
  Rhythmogram rg;
  rg.acf = features;
  rg.grid = grid;
  GmmModel model{k, means, variances, weights};
  report("posterior rows",
         time_it([&] { serial::posterior_rows(features, means, variances, weights); }),
         time_it([&] { posteriors(model, rg); }));

  std::vector<double> long_curve(200000);
  for (double& v : long_curve) v = rng.uniform();
  report("moving median",
         time_it([&] { serial::moving_median(long_curve, 101); }),
         time_it([&] { moving_median(long_curve, 101); }));
  return 0;
}
