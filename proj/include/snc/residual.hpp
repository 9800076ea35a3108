#pragma once

#include "snc/audio_buffer.hpp"

namespace snc {

// Residual / reconstruction statistics, all measured against the mix the
// residual was computed from. energy_ratio and snr_db are the same quantity
// in linear and log scales.
struct ResidualStats {
  double rms_db = 0.0;
  double peak_db = 0.0;
  double energy_ratio = 0.0;  // sum(r^2) / sum(m^2)
  double snr_db = 0.0;        // 10*log10(sum(m^2) / sum(r^2)); +inf when r = 0
};

// Plain sum of the decoded stems; no gain staging, no clipping.
AudioBuffer procedural_mix(const StemSet& decoded_stems);

// Sample-wise difference original - procedural. Alignment mismatches are
// hard errors: silently truncating here would corrupt the residual
// irreversibly.
AudioBuffer compute_residual(const AudioBuffer& original,
                             const AudioBuffer& procedural);

ResidualStats residual_stats(const AudioBuffer& original,
                             const AudioBuffer& residual);

// Decode-side reassembly: procedural mix + residual, then an attenuate-only
// peak ceiling (default -0.1 dBFS).
AudioBuffer reconstruct(const StemSet& decoded_stems,
                        const AudioBuffer& decoded_residual,
                        double ceiling_dbfs = -0.1);

}  // namespace snc
