#include "snc/audio_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snc/errors.hpp"

namespace snc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_channel_count(int channels) {
  if (channels != 1 && channels != 2) {
    throw Error(ErrorCode::Argument,
                "channel count must be 1 or 2, got " + std::to_string(channels));
  }
}

}  // namespace

AudioBuffer::AudioBuffer(int sample_rate, int channels, size_t length)
    : sample_rate_(sample_rate) {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::Argument, "sample rate must be positive");
  }
  check_channel_count(channels);
  data_.assign(static_cast<size_t>(channels), std::vector<double>(length, 0.0));
}

AudioBuffer::AudioBuffer(int sample_rate, std::vector<std::vector<double>> channels)
    : sample_rate_(sample_rate), data_(std::move(channels)) {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::Argument, "sample rate must be positive");
  }
  check_channel_count(static_cast<int>(data_.size()));
  for (const auto& ch : data_) {
    if (ch.size() != data_[0].size()) {
      throw Error(ErrorCode::Argument, "all channels must have equal length");
    }
  }
}

double AudioBuffer::duration_seconds() const {
  return static_cast<double>(length()) / sample_rate_;
}

std::span<const double> AudioBuffer::channel(int c) const {
  return {data_.at(static_cast<size_t>(c))};
}

std::span<double> AudioBuffer::channel(int c) {
  return {data_.at(static_cast<size_t>(c))};
}

std::string_view to_label(StemKind kind) {
  switch (kind) {
    case StemKind::Vocals: return "vocals";
    case StemKind::Drums: return "drums";
    case StemKind::Bass: return "bass";
    case StemKind::Other: return "other";
  }
  return "?";
}

std::optional<StemKind> stem_from_label(std::string_view label) {
  for (StemKind kind : kAllStemKinds) {
    if (to_label(kind) == label) return kind;
  }
  return std::nullopt;
}

StemSet::StemSet(std::map<StemKind, AudioBuffer> stems) : stems_(std::move(stems)) {
  if (stems_.empty()) return;
  const auto& first = stems_.begin()->second;
  size_t longest = 0;
  for (const auto& [kind, buf] : stems_) {
    if (buf.sample_rate() != first.sample_rate()) {
      throw Error(ErrorCode::Argument, "stems must share one sample rate");
    }
    if (buf.channels() != first.channels()) {
      throw Error(ErrorCode::Argument, "stems must share one channel count");
    }
    longest = std::max(longest, buf.length());
  }
  // Zero-pad shorter stems so every entry shares the common time axis.
  for (auto& [kind, buf] : stems_) {
    if (buf.length() == longest) continue;
    std::vector<std::vector<double>> padded;
    for (int c = 0; c < buf.channels(); ++c) {
      auto ch = buf.channel(c);
      std::vector<double> v(ch.begin(), ch.end());
      v.resize(longest, 0.0);
      padded.push_back(std::move(v));
    }
    buf = AudioBuffer(buf.sample_rate(), std::move(padded));
  }
}

const AudioBuffer& StemSet::at(StemKind kind) const {
  auto it = stems_.find(kind);
  if (it == stems_.end()) {
    throw Error(ErrorCode::Argument,
                std::string("no such stem: ") + std::string(to_label(kind)));
  }
  return it->second;
}

int StemSet::sample_rate() const {
  return stems_.empty() ? 0 : stems_.begin()->second.sample_rate();
}

int StemSet::channels() const {
  return stems_.empty() ? 0 : stems_.begin()->second.channels();
}

size_t StemSet::length() const {
  return stems_.empty() ? 0 : stems_.begin()->second.length();
}

AudioBuffer mix_sum(const StemSet& stems) {
  if (stems.empty()) {
    throw Error(ErrorCode::Argument, "cannot mix an empty stem set");
  }
  AudioBuffer out(stems.sample_rate(), stems.channels(), stems.length());
  for (const auto& [kind, buf] : stems.entries()) {
    for (int c = 0; c < out.channels(); ++c) {
      auto dst = out.channel(c);
      auto src = buf.channel(c);
      for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
  return out;
}

double rms_dbfs(const AudioBuffer& buffer) {
  if (buffer.empty()) {
    throw Error(ErrorCode::Argument, "rms of an empty buffer is undefined");
  }
  double sum_sq = 0.0;
  size_t n = 0;
  for (int c = 0; c < buffer.channels(); ++c) {
    for (double s : buffer.channel(c)) sum_sq += s * s;
    n += buffer.length();
  }
  if (sum_sq == 0.0) return -kInf;
  return 10.0 * std::log10(sum_sq / static_cast<double>(n));
}

double peak_dbfs(const AudioBuffer& buffer) {
  if (buffer.empty()) {
    throw Error(ErrorCode::Argument, "peak of an empty buffer is undefined");
  }
  double peak = 0.0;
  for (int c = 0; c < buffer.channels(); ++c) {
    for (double s : buffer.channel(c)) peak = std::max(peak, std::abs(s));
  }
  if (peak == 0.0) return -kInf;
  return 20.0 * std::log10(peak);
}

double db_to_linear(double db) { return std::pow(10.0, db / 20.0); }

double linear_to_db(double linear) {
  return linear <= 0.0 ? -kInf : 20.0 * std::log10(linear);
}

AudioBuffer apply_gain(const AudioBuffer& buffer, double linear_gain) {
  AudioBuffer out = buffer;
  for (int c = 0; c < out.channels(); ++c) {
    for (double& s : out.channel(c)) s *= linear_gain;
  }
  return out;
}

namespace {

void check_aligned(const AudioBuffer& a, const AudioBuffer& b) {
  if (a.sample_rate() != b.sample_rate()) {
    throw Error(ErrorCode::Alignment,
                "sample rate mismatch: " + std::to_string(a.sample_rate()) +
                    " vs " + std::to_string(b.sample_rate()));
  }
  if (a.channels() != b.channels()) {
    throw Error(ErrorCode::Alignment,
                "channel count mismatch: " + std::to_string(a.channels()) +
                    " vs " + std::to_string(b.channels()));
  }
  if (a.length() != b.length()) {
    throw Error(ErrorCode::Alignment,
                "length mismatch: " + std::to_string(a.length()) + " vs " +
                    std::to_string(b.length()));
  }
}

}  // namespace

AudioBuffer add(const AudioBuffer& a, const AudioBuffer& b) {
  check_aligned(a, b);
  AudioBuffer out = a;
  for (int c = 0; c < out.channels(); ++c) {
    auto dst = out.channel(c);
    auto src = b.channel(c);
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

AudioBuffer subtract(const AudioBuffer& a, const AudioBuffer& b) {
  check_aligned(a, b);
  AudioBuffer out = a;
  for (int c = 0; c < out.channels(); ++c) {
    auto dst = out.channel(c);
    auto src = b.channel(c);
    for (size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  }
  return out;
}

AudioBuffer downmix_mono(const AudioBuffer& buffer) {
  if (buffer.channels() == 1) return buffer;
  AudioBuffer out(buffer.sample_rate(), 1, buffer.length());
  auto dst = out.channel(0);
  auto l = buffer.channel(0);
  auto r = buffer.channel(1);
  for (size_t i = 0; i < dst.size(); ++i) dst[i] = 0.5 * (l[i] + r[i]);
  return out;
}

AudioBuffer quantize_grid(const AudioBuffer& buffer) {
  constexpr double kScale = 2147483648.0;  // 2^31
  AudioBuffer out = buffer;
  for (int c = 0; c < out.channels(); ++c) {
    for (double& s : out.channel(c)) s = std::nearbyint(s * kScale) / kScale;
  }
  return out;
}

}  // namespace snc
