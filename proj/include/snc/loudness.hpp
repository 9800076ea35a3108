#pragma once

#include <utility>

#include "snc/audio_buffer.hpp"

namespace snc {

struct LoudnessResult {
  double integrated_lufs = 0.0;  // -inf for silence
  double gain_applied_db = 0.0;  // 0 when nothing was applied
};

// Integrated loudness: K-weighting, 400 ms blocks at 75% overlap, -70 LUFS
// absolute gate, then a relative gate 10 LU below the gated mean. Channel
// weights are 1.0 (stereo L/R). Returns -inf for silence. Signals shorter
// than one block are measured as a single block spanning the whole signal.
double measure_integrated_lufs(const AudioBuffer& buffer);

// Measures, then applies the static gain that lands on `target_lufs`.
// Silence comes back unchanged with zero gain.
std::pair<AudioBuffer, LoudnessResult> normalize_lufs(const AudioBuffer& buffer,
                                                      double target_lufs);

// Attenuate-only safety gain: when the sample peak exceeds the ceiling, the
// whole buffer is scaled so the peak sits exactly at the ceiling. Input at
// or below the ceiling is returned bit-identical, so a second application
// never changes anything.
AudioBuffer apply_peak_ceiling(const AudioBuffer& buffer, double ceiling_dbfs);

namespace detail {

struct Biquad {
  double b0, b1, b2, a1, a2;  // a0 already normalized out
};

// K-weighting stages designed for an arbitrary rate via the bilinear
// transform; at 48 kHz they reproduce the standard's table coefficients.
Biquad k_shelf(int sample_rate);
Biquad k_highpass(int sample_rate);

}  // namespace detail

}  // namespace snc
