#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace snc {

// Planar 64-bit float PCM. Nominal full scale is +/-1.0 (dimensionless);
// nothing here clips or normalizes unless an operation says so.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(int sample_rate, int channels, size_t length);  // zero-filled
  AudioBuffer(int sample_rate, std::vector<std::vector<double>> channels);

  int sample_rate() const { return sample_rate_; }
  int channels() const { return static_cast<int>(data_.size()); }
  size_t length() const { return data_.empty() ? 0 : data_[0].size(); }
  bool empty() const { return length() == 0; }
  double duration_seconds() const;

  std::span<const double> channel(int c) const;
  std::span<double> channel(int c);

 private:
  int sample_rate_ = 48000;
  std::vector<std::vector<double>> data_;
};

enum class StemKind { Vocals = 0, Drums = 1, Bass = 2, Other = 3 };

inline constexpr std::array<StemKind, 4> kAllStemKinds{
    StemKind::Vocals, StemKind::Drums, StemKind::Bass, StemKind::Other};

std::string_view to_label(StemKind kind);  // "vocals", "drums", "bass", "other"
std::optional<StemKind> stem_from_label(std::string_view label);

// Named stems sharing one time axis. Construction zero-pads shorter stems to
// the longest and rejects mixed sample rates or channel counts. Iteration is
// always in StemKind ordinal order (std::map key order).
class StemSet {
 public:
  StemSet() = default;
  explicit StemSet(std::map<StemKind, AudioBuffer> stems);

  bool has(StemKind kind) const { return stems_.count(kind) != 0; }
  const AudioBuffer& at(StemKind kind) const;
  const std::map<StemKind, AudioBuffer>& entries() const { return stems_; }
  size_t size() const { return stems_.size(); }
  bool empty() const { return stems_.empty(); }

  int sample_rate() const;
  int channels() const;
  size_t length() const;

 private:
  std::map<StemKind, AudioBuffer> stems_;
};

// Sample-wise sum in StemKind ordinal order; no gain staging or clipping.
AudioBuffer mix_sum(const StemSet& stems);

// 20*log10 of RMS / peak over all samples of all channels; -inf for silence.
double rms_dbfs(const AudioBuffer& buffer);
double peak_dbfs(const AudioBuffer& buffer);

double db_to_linear(double db);
double linear_to_db(double linear);

AudioBuffer apply_gain(const AudioBuffer& buffer, double linear_gain);
// Alignment-checked elementwise ops (equal rate, channels, length).
AudioBuffer add(const AudioBuffer& a, const AudioBuffer& b);
AudioBuffer subtract(const AudioBuffer& a, const AudioBuffer& b);
AudioBuffer downmix_mono(const AudioBuffer& buffer);

// Snap samples to the absolute 2^-31 grid (~ -186 dBFS quantization). Values
// on this grid sum and subtract exactly in double arithmetic, which is what
// makes the mix = procedural + residual identity hold bit-exactly.
AudioBuffer quantize_grid(const AudioBuffer& buffer);

}  // namespace snc
