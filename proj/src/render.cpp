#include "talaseg/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "talaseg/novelty.hpp"

namespace talaseg {

namespace {

std::string format_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string pgm_header(int width, int height) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "P5\n%d %d\n255\n", width, height);
  return buf;
}

}  // namespace

std::string odf_csv(const OnsetDetectionFunction& odf) {
  std::string out = "time_s,value\n";
  for (size_t t = 0; t < odf.values.size(); ++t) {
    out += format_number(t / odf.frame_rate);
    out += ',';
    out += format_number(odf.values[t]);
    out += '\n';
  }
  return out;
}

std::string rhythmogram_csv(const Rhythmogram& rg) {
  std::string out = "time_s";
  for (int l = 0; l < rg.acf.cols; ++l) {
    out += ",lag_" + format_number(l * Rhythmogram::kLagStep);
  }
  out += '\n';
  for (int r = 0; r < rg.acf.rows; ++r) {
    out += format_number(rg.grid.center(r));
    for (int l = 0; l < rg.acf.cols; ++l) {
      out += ',';
      out += format_number(rg.acf.at(r, l));
    }
    out += '\n';
  }
  return out;
}

std::string rhythmogram_pgm(const Rhythmogram& rg) {
  std::string out = pgm_header(rg.acf.rows, rg.acf.cols);
  out.reserve(out.size() + static_cast<size_t>(rg.acf.rows) * rg.acf.cols);
  for (int lag = rg.acf.cols - 1; lag >= 0; --lag) {  // lag 0 at the bottom
    for (int r = 0; r < rg.acf.rows; ++r) {
      const double v = std::clamp(rg.acf.at(r, lag), -1.0, 1.0);
      out += static_cast<char>(std::lround(255.0 * (v + 1.0) / 2.0));
    }
  }
  return out;
}

std::string novelty_csv(const NoveltySet& set) {
  std::string out = "time_s";
  for (const auto& curve : set.curves) {
    out += ',';
    out += novelty_label(curve.kind);
  }
  out += '\n';
  const size_t n = set.curves[0].values.size();
  for (size_t t = 0; t < n; ++t) {
    out += format_number(set.curves[0].grid.center(static_cast<int>(t)));
    for (const auto& curve : set.curves) {
      out += ',';
      out += format_number(curve.values[t]);
    }
    out += '\n';
  }
  return out;
}

std::string ssm_pgm(const Matrix& ssm) {
  double peak = 0.0;
  for (double v : ssm.data) peak = std::max(peak, v);
  std::string out = pgm_header(ssm.cols, ssm.rows);
  out.reserve(out.size() + ssm.data.size());
  for (int i = 0; i < ssm.rows; ++i) {
    for (int j = 0; j < ssm.cols; ++j) {
      const double v = peak > 0.0 ? ssm.at(i, j) / peak : 0.0;
      out += static_cast<char>(std::lround(255.0 * v));
    }
  }
  return out;
}

}  // namespace talaseg
