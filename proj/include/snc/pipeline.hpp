#pragma once

#include <map>
#include <vector>

#include "snc/audio_buffer.hpp"
#include "snc/codec.hpp"
#include "snc/container.hpp"
#include "snc/loudness.hpp"
#include "snc/metadata.hpp"
#include "snc/residual.hpp"

namespace snc {

// Encode-side knobs. Absent overrides mean the house bitrate ladder;
// metadata nullptr means defaults generated for the present stems.
struct EncodeOptions {
  std::map<StemKind, int> bitrate_overrides_kbps;
  int residual_bitrate_kbps = 64;
  double loudness_target_lufs = -16.0;
  const SncMetadata* metadata = nullptr;
};

// Everything one encode pass produces, pre-container.
struct EncodeSession {
  std::map<StemKind, EncodedStream> stems;
  EncodedStream residual;
  SncMetadata metadata;
  AudioBuffer normalized_mix;  // grid-quantized mix the residual refers to
  LoudnessResult loudness;     // input loudness and the gain applied
  ResidualStats residual_stats;
};

// The full encode pipeline: normalize the mix to the loudness target and
// scale every stem by that same gain, encode the stems concurrently on the
// bitrate ladder, decode them back, take the procedural mix, compute the
// mastering residual, verify the exact identity mix = procedural + residual
// (a violation aborts with a codec error — it would poison every file), and
// encode the residual. When `original_mix` is null the mix is synthesized
// as the stem sum, so the residual captures pure coding error.
EncodeSession encode_session(const StemSet& stems,
                             const AudioBuffer* original_mix,
                             const EncodeOptions& options = {});

// Containerizes a finished session (mux of its streams and metadata).
std::vector<uint8_t> session_to_bytes(const EncodeSession& session);

// Decode side: every stream decoded, plus the ceiling-limited
// reconstruction mix = procedural + residual.
struct DecodedFile {
  StemSet stems;
  AudioBuffer residual;
  AudioBuffer reconstruction;
};

DecodedFile decode_file(const SncFile& file, double ceiling_dbfs = -0.1);

}  // namespace snc
