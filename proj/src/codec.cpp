#include "snc/codec.hpp"

#include <cstdlib>

#include "snc/errors.hpp"

namespace snc {

const LossyCodec& opus_codec_instance();  // codec_opus.cpp

BitrateHierarchy BitrateHierarchy::defaults() {
  BitrateHierarchy h;
  h.vocals.bitrate_kbps = 128;
  h.drums.bitrate_kbps = 96;
  h.bass.bitrate_kbps = 96;
  h.other.bitrate_kbps = 96;
  h.residual.bitrate_kbps = 64;
  return h;
}

const EncodeProfile& BitrateHierarchy::stem_profile(StemKind kind) const {
  switch (kind) {
    case StemKind::Vocals: return vocals;
    case StemKind::Drums: return drums;
    case StemKind::Bass: return bass;
    case StemKind::Other: return other;
  }
  throw Error(ErrorCode::Argument, "unknown stem kind");
}

size_t EncodedStream::payload_bytes() const {
  size_t total = 0;
  for (const auto& p : packets) total += p.bytes.size();
  return total;
}

double EncodedStream::measured_bitrate_kbps() const {
  if (original_length == 0) return 0.0;
  const double seconds = static_cast<double>(original_length) / sample_rate;
  return static_cast<double>(payload_bytes()) * 8.0 / seconds / 1000.0;
}

const LossyCodec& codec_backend(std::string_view id) {
  if (id == "opus") return opus_codec_instance();
  throw Error(ErrorCode::Argument,
              "unknown codec backend '" + std::string(id) + "' (available: opus)");
}

const LossyCodec& default_codec_backend() {
  const char* env = std::getenv("SNC_CODEC_BACKEND");
  return codec_backend(env != nullptr && *env != '\0' ? env : "opus");
}

EncodedStream lossy_encode(const AudioBuffer& buffer, const EncodeProfile& profile,
                           const LossyCodec& backend) {
  if (profile.bitrate_kbps < 8 || profile.bitrate_kbps > 512) {
    throw Error(ErrorCode::Argument,
                "bitrate " + std::to_string(profile.bitrate_kbps) +
                    " kbps outside [8, 512]");
  }
  if (profile.complexity < 0 || profile.complexity > 10) {
    throw Error(ErrorCode::Argument, "complexity outside [0, 10]");
  }
  const double f = profile.frame_ms;
  if (f != 2.5 && f != 5.0 && f != 10.0 && f != 20.0 && f != 40.0 && f != 60.0) {
    throw Error(ErrorCode::Argument, "frame duration must be one of "
                                     "2.5/5/10/20/40/60 ms");
  }
  return backend.encode(buffer, profile);
}

EncodedStream lossy_encode(const AudioBuffer& buffer, const EncodeProfile& profile) {
  return lossy_encode(buffer, profile, default_codec_backend());
}

AudioBuffer lossy_decode(const EncodedStream& stream, const LossyCodec& backend) {
  // Grid quantization keeps later stem sums / residual differences exact;
  // the step (2^-31, about -186 dBFS) is far below any codec's noise floor.
  return quantize_grid(backend.decode(stream));
}

AudioBuffer lossy_decode(const EncodedStream& stream) {
  return lossy_decode(stream, codec_backend(stream.codec_id));
}

AudioBuffer roundtrip(const AudioBuffer& buffer, const EncodeProfile& profile) {
  const LossyCodec& backend = default_codec_backend();
  return lossy_decode(lossy_encode(buffer, profile, backend), backend);
}

}  // namespace snc
