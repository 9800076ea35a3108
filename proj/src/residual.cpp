#include "snc/residual.hpp"

#include <cmath>
#include <limits>

#include "snc/errors.hpp"
#include "snc/loudness.hpp"

namespace snc {

AudioBuffer procedural_mix(const StemSet& decoded_stems) {
  return mix_sum(decoded_stems);
}

AudioBuffer compute_residual(const AudioBuffer& original,
                             const AudioBuffer& procedural) {
  return subtract(original, procedural);
}

ResidualStats residual_stats(const AudioBuffer& original,
                             const AudioBuffer& residual) {
  if (original.length() != residual.length()) {
    throw Error(ErrorCode::Alignment, "original and residual lengths differ");
  }
  if (original.empty()) {
    throw Error(ErrorCode::Argument, "residual stats of empty buffers");
  }

  double sum_m = 0.0, sum_r = 0.0;
  for (int c = 0; c < original.channels(); ++c) {
    for (double s : original.channel(c)) sum_m += s * s;
  }
  for (int c = 0; c < residual.channels(); ++c) {
    for (double s : residual.channel(c)) sum_r += s * s;
  }
  if (sum_m == 0.0) {
    throw Error(ErrorCode::Undefined, "SNR undefined for a silent original");
  }

  ResidualStats stats;
  stats.rms_db = rms_dbfs(residual);
  stats.peak_db = peak_dbfs(residual);
  stats.energy_ratio = sum_r / sum_m;
  stats.snr_db = sum_r == 0.0 ? std::numeric_limits<double>::infinity()
                              : 10.0 * std::log10(sum_m / sum_r);
  return stats;
}

AudioBuffer reconstruct(const StemSet& decoded_stems,
                        const AudioBuffer& decoded_residual,
                        double ceiling_dbfs) {
  return apply_peak_ceiling(add(procedural_mix(decoded_stems), decoded_residual),
                            ceiling_dbfs);
}

}  // namespace snc
