#pragma once

#include <string>

#include "talaseg/types.hpp"

namespace talaseg {

struct NoveltySet;

/// Two-column CSV (time_s, value) of the ODF.
std::string odf_csv(const OnsetDetectionFunction& odf);

/// CSV matrix, one grid frame per row, lag columns.
std::string rhythmogram_csv(const Rhythmogram& rg);

/// 8-bit binary PGM, rows = lags with lag 0 at the bottom, columns = frames,
/// value = round(255 * (v + 1) / 2).
std::string rhythmogram_pgm(const Rhythmogram& rg);

/// Wide CSV: time plus the six novelty curves.
std::string novelty_csv(const NoveltySet& set);

/// PGM of a distance matrix, value = round(255 * d / max d).
std::string ssm_pgm(const Matrix& ssm);

}  // namespace talaseg
