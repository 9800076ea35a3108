#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "snc/audio_buffer.hpp"

namespace snc {

// Per-stream encoder settings. Defaults are the house style for every
// stream: constrained VBR, maximum complexity, 20 ms frames, music hint.
struct EncodeProfile {
  int bitrate_kbps = 96;
  bool constrained_vbr = true;
  int complexity = 10;
  double frame_ms = 20.0;
  bool music_hint = true;
};

// Bitrate ladder for the four stems plus the mastering residual.
struct BitrateHierarchy {
  EncodeProfile vocals;
  EncodeProfile drums;
  EncodeProfile bass;
  EncodeProfile other;
  EncodeProfile residual;

  // Vocals 128 kbps (most salient), drums/bass/other 96, residual 64.
  static BitrateHierarchy defaults();
  const EncodeProfile& stem_profile(StemKind kind) const;
};

struct EncodedPacket {
  std::vector<uint8_t> bytes;
  int samples = 0;  // decoder output per packet, at stream sample rate
};

struct EncodedStream {
  std::string codec_id;  // registry key of the backend that produced it
  int sample_rate = 48000;
  int channels = 2;
  int preskip_samples = 0;      // decoder warm-up to drop from the head
  uint64_t original_length = 0;  // exact encoder input length in samples
  int nominal_bitrate_kbps = 0;
  std::vector<EncodedPacket> packets;

  size_t payload_bytes() const;
  // Payload bits divided by original duration; 0 for empty streams.
  double measured_bitrate_kbps() const;
};

// One perceptual codec backend. Implementations are stateless from the
// caller's view: each call builds its own encoder/decoder instance, so a
// backend object may be shared across threads.
class LossyCodec {
 public:
  virtual ~LossyCodec() = default;
  virtual std::string_view id() const = 0;
  virtual EncodedStream encode(const AudioBuffer& buffer,
                               const EncodeProfile& profile) const = 0;
  virtual AudioBuffer decode(const EncodedStream& stream) const = 0;
  // Decoder output length of a single packet, for rebuilding stream
  // durations from stored payloads. Codec errors on unreadable bytes.
  virtual int packet_samples(const std::vector<uint8_t>& packet,
                             int sample_rate) const = 0;
};

// Backend lookup by id; unknown ids are argument errors. The default id is
// "opus", overridable through the SNC_CODEC_BACKEND environment variable.
const LossyCodec& codec_backend(std::string_view id);
const LossyCodec& default_codec_backend();

// Convenience wrappers over the default backend (or an explicit one). The
// decode side additionally quantizes output to the 2^-31 grid — see
// audio_buffer.hpp — so that sums and differences of decoded stems stay
// exact in double arithmetic.
EncodedStream lossy_encode(const AudioBuffer& buffer, const EncodeProfile& profile);
EncodedStream lossy_encode(const AudioBuffer& buffer, const EncodeProfile& profile,
                           const LossyCodec& backend);
AudioBuffer lossy_decode(const EncodedStream& stream);
AudioBuffer lossy_decode(const EncodedStream& stream, const LossyCodec& backend);
AudioBuffer roundtrip(const AudioBuffer& buffer, const EncodeProfile& profile);

}  // namespace snc
