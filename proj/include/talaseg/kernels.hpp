#pragma once

#include <vector>

#include "talaseg/types.hpp"

namespace talaseg {

/// Centered moving median; the window is truncated at the edges. Parallel over
/// output elements.
std::vector<double> moving_median(const std::vector<double>& values, int window);

}  // namespace talaseg
