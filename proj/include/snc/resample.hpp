#pragma once

#include "snc/audio_buffer.hpp"

namespace snc {

// Sample-rate conversion with a Kaiser-windowed sinc kernel (beta = 10,
// 64 zero crossings per side). When rates match the input is returned
// unchanged, bit for bit. Output length is round(n * target / source).
AudioBuffer resample(const AudioBuffer& input, int target_rate);

}  // namespace snc
