#pragma once

#include <cstdint>
#include <filesystem>

#include "snc/audio_buffer.hpp"

namespace snc {

// Sample encodings supported when writing. Reading additionally accepts
// 32-bit integer PCM and WAVE_FORMAT_EXTENSIBLE wrappers of any of these.
enum class WavFormat {
  Pcm16,
  Pcm24,
  Float32,
};

// Reads a RIFF/WAVE file into doubles in [-1, 1). Integer PCM is scaled by
// 1 / 2^(bits-1); float data is passed through unchanged.
AudioBuffer read_wav(const std::filesystem::path& path);

// Writes `buffer` with the requested sample encoding. Integer formats clamp
// to the representable range after rounding.
void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
               WavFormat format = WavFormat::Pcm24);

}  // namespace snc
