#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "snc/audio_buffer.hpp"
#include "snc/residual.hpp"

namespace snc {

// Analysis STFT settings. The window is Hann, fixed; these defaults are the
// reproducible reference parameters for spectral convergence and entropy.
struct StftParams {
  int fft_size = 2048;
  int hop = 512;
};

// Short-time objective intelligibility, the standard formulation: 10 kHz,
// 256-sample half-overlapped frames, 512-point FFT, 15 one-third-octave
// bands from 150 Hz, 40 dB silent-frame removal, 30-frame segments,
// normalization with a -15 dB SDR clip, correlation averaged over bands and
// segments. Multichannel input is mean-downmixed first. Result in [0, 1].
// Shorter than one analysis segment after silence removal → argument error.
double stoi(const AudioBuffer& reference, const AudioBuffer& degraded);

// ‖|X| − |X̂|‖_F / ‖|X|‖_F per channel, averaged across channels.
// Silent reference → undefined error.
double spectral_convergence(const AudioBuffer& reference,
                            const AudioBuffer& degraded,
                            const StftParams& params = {});

// 10·log10(Σ ref² / Σ (ref − deg)²) over all channels and samples.
// Identical signals → +inf sentinel; silent reference → undefined error.
double snr_db(const AudioBuffer& reference, const AudioBuffer& degraded);

// Mean per-frame Shannon entropy (bits) of the normalized power spectrum;
// frames below −60 dBFS RMS are skipped. All frames silent → undefined.
double spectral_entropy(const AudioBuffer& buffer, const StftParams& params = {});

// Empirical test of the stem-vs-mix entropy comparison. Per-stem mean
// entropies are weighted by active-frame share (retained_i / retained_mix)
// so intermittent stems contribute only their active time; fully silent
// stems are skipped. The verdict is reported, never asserted.
struct EntropyReport {
  std::map<StemKind, double> stem_entropy_bits;  // non-silent stems only
  std::map<StemKind, double> stem_weight;
  double weighted_stem_sum_bits = 0.0;
  double mix_entropy_bits = 0.0;
  bool inequality_holds = false;  // weighted sum < mix entropy
};
EntropyReport entropy_comparison(const StemSet& stems, const AudioBuffer& mix,
                                 const StftParams& params = {});

// The full objective-quality bundle for one reconstruction, as the CLI
// prints and the bench table consumes.
struct QualityReport {
  double stoi = 0.0;
  double spectral_convergence = 0.0;
  double snr_db = 0.0;
  ResidualStats residual;
  std::map<std::string, size_t> sizes;  // per-component bytes
};

// Deterministic JSON rendering (sorted keys, no timestamps).
std::string quality_report_json(const QualityReport& report, bool pretty = true);

}  // namespace snc
