#include "talaseg/wav.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "talaseg/error.hpp"

namespace talaseg {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

AudioBuffer load_audio(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_unreadable, "cannot open file: " + path);

  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::format_unsupported, "not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  size_t data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    uint32_t len = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + len > bytes.size()) len = static_cast<uint32_t>(bytes.size() - pos);

    if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
      const uint8_t* f = bytes.data() + pos;
      format = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible && len >= 26) {
        format = read_u16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_len = len;
    }
    pos += len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw Error(Errc::format_unsupported, "missing fmt chunk: " + path);
  if (format != kFormatPcm && format != kFormatFloat) {
    throw Error(Errc::format_unsupported, "non-PCM codec (format tag " +
                                              std::to_string(format) + "): " + path);
  }
  if (channels < 1 || channels > 2) {
    throw Error(Errc::format_unsupported,
                "unsupported channel count " + std::to_string(channels) + ": " + path);
  }
  if (format == kFormatPcm && bits != 8 && bits != 16 && bits != 24) {
    throw Error(Errc::format_unsupported,
                "unsupported PCM bit depth " + std::to_string(bits) + ": " + path);
  }
  if (format == kFormatFloat && bits != 32) {
    throw Error(Errc::format_unsupported, "unsupported float bit depth: " + path);
  }
  if (sample_rate == 0) throw Error(Errc::format_unsupported, "zero sample rate: " + path);

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_size = bytes_per_sample * channels;
  const size_t frames = (data == nullptr) ? 0 : data_len / frame_size;
  if (frames == 0) throw Error(Errc::audio_empty, "zero-length audio: " + path);

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(sample_rate);
  buf.samples.resize(frames);

  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (uint16_t c = 0; c < channels; ++c) {
      const uint8_t* p = data + i * frame_size + c * bytes_per_sample;
      double v = 0.0;
      switch (bits) {
        case 8:
          v = (static_cast<int>(p[0]) - 128) / 128.0;
          break;
        case 16: {
          int16_t s = static_cast<int16_t>(p[0] | (p[1] << 8));
          v = s / 32768.0;
          break;
        }
        case 24: {
          int32_t s = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
          if (s & 0x800000) s |= ~0xFFFFFF;  // sign extend
          v = s / 8388608.0;
          break;
        }
        case 32: {
          float f;
          std::memcpy(&f, p, 4);
          v = static_cast<double>(f);
          break;
        }
      }
      acc += v;
    }
    buf.samples[i] = std::clamp(acc / channels, -1.0, 1.0);
  }
  return buf;
}

void write_wav(const std::string& path, const AudioBuffer& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_unreadable, "cannot write file: " + path);

  const uint32_t n = static_cast<uint32_t>(buf.samples.size());
  const uint32_t data_len = n * 2;
  const uint32_t rate = static_cast<uint32_t>(buf.sample_rate);
  const uint32_t byte_rate = rate * 2;

  auto put_u32 = [&](uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(b, 4);
  };
  auto put_u16 = [&](uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);
  put_u32(rate);
  put_u32(byte_rate);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_len);

  for (uint32_t i = 0; i < n; ++i) {
    double v = std::clamp(buf.samples[i], -1.0, 1.0);
    int s = static_cast<int>(std::lround(v * 32767.0));
    put_u16(static_cast<uint16_t>(static_cast<int16_t>(s)));
  }
  if (!out) throw Error(Errc::io_unreadable, "write failed: " + path);
}

}  // namespace talaseg
