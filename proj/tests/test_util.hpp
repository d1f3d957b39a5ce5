#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "talaseg/types.hpp"

namespace testutil {

constexpr double kPi = 3.14159265358979323846264338327950288;

inline talaseg::AudioBuffer tone(double freq, double duration_s, int rate,
                                 double amplitude = 0.8) {
  talaseg::AudioBuffer buf;
  buf.sample_rate = rate;
  const int n = static_cast<int>(std::lround(duration_s * rate));
  buf.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    buf.samples[i] = amplitude * std::sin(2.0 * kPi * freq * i / rate);
  }
  return buf;
}

/// Direct DFT magnitude at one frequency; the oracle for resampler tests.
inline double dft_magnitude(const std::vector<double>& x, double freq, int rate) {
  double re = 0.0, im = 0.0;
  for (size_t n = 0; n < x.size(); ++n) {
    const double ang = 2.0 * kPi * freq * static_cast<double>(n) / rate;
    re += x[n] * std::cos(ang);
    im -= x[n] * std::sin(ang);
  }
  return std::sqrt(re * re + im * im);
}

/// Peak frequency by scanning bin-spaced frequencies up to f_max.
inline double dft_peak_frequency(const std::vector<double>& x, int rate, double f_max) {
  const double bin = static_cast<double>(rate) / static_cast<double>(x.size());
  double best_f = 0.0, best_m = -1.0;
  for (double f = bin; f < f_max; f += bin) {
    const double m = dft_magnitude(x, f, rate);
    if (m > best_m) {
      best_m = m;
      best_f = f;
    }
  }
  return best_f;
}

/// Ideal impulse ODF with the given onset times.
inline talaseg::OnsetDetectionFunction impulse_odf(const std::vector<double>& times,
                                                   double duration_s) {
  talaseg::OnsetDetectionFunction odf;
  odf.values.assign(static_cast<size_t>(std::ceil(duration_s * 100.0 - 1e-9)), 0.0);
  for (double t : times) {
    const size_t frame = static_cast<size_t>(std::llround(t * 100.0));
    if (frame < odf.values.size()) odf.values[frame] += 1.0;
  }
  return odf;
}

inline std::vector<double> periodic_times(double period, double start, double end) {
  std::vector<double> times;
  for (double t = start; t < end; t += period) times.push_back(t);
  return times;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    static const uint64_t run_tag = std::random_device{}();
    dir_ = std::filesystem::temp_directory_path() /
           ("talaseg_test_" + std::to_string(run_tag) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Hand-assembled WAV bytes for the reader tests.
inline std::string wav_bytes(uint16_t format, uint16_t channels, uint32_t rate,
                             uint16_t bits, const std::string& data) {
  auto u32 = [](uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    return std::string(b, 4);
  };
  auto u16 = [](uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    return std::string(b, 2);
  };
  const uint16_t block = static_cast<uint16_t>(channels * bits / 8);
  std::string out = "RIFF" + u32(36 + static_cast<uint32_t>(data.size())) + "WAVE";
  out += "fmt " + u32(16) + u16(format) + u16(channels) + u32(rate) +
         u32(rate * block) + u16(block) + u16(bits);
  out += "data" + u32(static_cast<uint32_t>(data.size())) + data;
  return out;
}

inline std::string pcm16(const std::vector<int16_t>& samples) {
  std::string out(samples.size() * 2, '\0');
  std::memcpy(out.data(), samples.data(), out.size());
  return out;
}

inline std::string pcm_float(const std::vector<float>& samples) {
  std::string out(samples.size() * 4, '\0');
  std::memcpy(out.data(), samples.data(), out.size());
  return out;
}

}  // namespace testutil
