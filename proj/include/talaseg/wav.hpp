#pragma once

#include <string>

#include "talaseg/types.hpp"

namespace talaseg {

/// Reads a RIFF/WAVE PCM file (8/16/24-bit int or 32-bit float, 1-2 channels).
/// Stereo is downmixed by channel mean; samples are scaled to [-1, 1].
AudioBuffer load_audio(const std::string& path);

/// Writes mono 16-bit PCM.
void write_wav(const std::string& path, const AudioBuffer& buf);

}  // namespace talaseg
