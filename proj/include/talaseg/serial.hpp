#pragma once

#include <vector>

#include "talaseg/types.hpp"

namespace talaseg::serial {

/// Plain single-threaded reference implementations of the OpenMP kernels.
/// Tests assert element-wise equality against the parallel versions; the bench
/// target compares their runtimes. Each is a direct transcription of the
/// operation's definition.

Matrix ssm(const Matrix& features);

Matrix rhythmogram_rows(const std::vector<double>& odf, int window, int hop, int lags);

std::vector<double> novelty_from_ssm(const Matrix& ssm, const Matrix& kernel);

Matrix posterior_rows(const Matrix& rows, const Matrix& means, const Matrix& variances,
                      const std::vector<double>& weights);

std::vector<double> moving_median(const std::vector<double>& values, int window);

}  // namespace talaseg::serial
