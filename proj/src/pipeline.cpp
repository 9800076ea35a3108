#include "snc/pipeline.hpp"

#include <cmath>
#include <future>
#include <utility>

#include "snc/errors.hpp"

namespace snc {

EncodeSession encode_session(const StemSet& stems,
                             const AudioBuffer* original_mix,
                             const EncodeOptions& options) {
  if (stems.empty()) {
    throw Error(ErrorCode::Argument, "encode needs at least one stem");
  }

  AudioBuffer mix = original_mix ? *original_mix : mix_sum(stems);
  if (original_mix &&
      (mix.sample_rate() != stems.sample_rate() ||
       mix.channels() != stems.channels() || mix.length() != stems.length())) {
    throw Error(ErrorCode::Alignment,
                "original mix does not share the stems' shape");
  }

  EncodeSession session;

  // Normalization first: the mix lands on the loudness target and every
  // stem moves by the same gain, so the balance is untouched and the
  // stored residual refers to the distribution-level mix. The normalized
  // mix is snapped to the decoder's sample grid — that is what makes the
  // residual identity exact instead of within-epsilon.
  auto [normalized, loudness] =
      normalize_lufs(mix, options.loudness_target_lufs);
  session.loudness = loudness;
  session.normalized_mix = quantize_grid(normalized);

  const double gain = db_to_linear(loudness.gain_applied_db);
  std::map<StemKind, AudioBuffer> scaled;
  for (const auto& [kind, buffer] : stems.entries()) {
    scaled.emplace(kind, apply_gain(buffer, gain));
  }

  BitrateHierarchy ladder = BitrateHierarchy::defaults();
  const auto profile_for = [&](StemKind kind) {
    EncodeProfile profile = ladder.stem_profile(kind);
    auto it = options.bitrate_overrides_kbps.find(kind);
    if (it != options.bitrate_overrides_kbps.end()) {
      profile.bitrate_kbps = it->second;
    }
    return profile;
  };

  // Stems encode concurrently; each task owns its codec instance. Results
  // are keyed by stem, so completion order cannot reorder anything.
  std::map<StemKind, std::future<EncodedStream>> encoding;
  for (const auto& [kind, buffer] : scaled) {
    encoding.emplace(kind, std::async(std::launch::async, [&, kind] {
                       return lossy_encode(scaled.at(kind), profile_for(kind));
                     }));
  }
  for (auto& [kind, task] : encoding) {
    session.stems.emplace(kind, task.get());
  }

  // Round-trip decode: the residual must be computed against what a
  // decoder will actually reproduce, not against the encoder input.
  std::map<StemKind, std::future<AudioBuffer>> decoding;
  for (const auto& [kind, stream] : session.stems) {
    decoding.emplace(kind, std::async(std::launch::async, [&stream] {
                       return lossy_decode(stream);
                     }));
  }
  std::map<StemKind, AudioBuffer> decoded;
  for (auto& [kind, task] : decoding) {
    decoded.emplace(kind, task.get());
  }

  const AudioBuffer procedural = procedural_mix(StemSet(std::move(decoded)));
  const AudioBuffer residual =
      compute_residual(session.normalized_mix, procedural);

  // Exact identity gate: with mix and decoder output both on the sample
  // grid, procedural + residual must rebuild the mix bit for bit. Anything
  // else means a codec or grid regression that would corrupt every file
  // this build writes.
  double worst = 0.0;
  for (int c = 0; c < procedural.channels(); ++c) {
    for (size_t i = 0; i < procedural.length(); ++i) {
      const double rebuilt = procedural.channel(c)[i] + residual.channel(c)[i];
      worst = std::max(
          worst, std::abs(session.normalized_mix.channel(c)[i] - rebuilt));
    }
  }
  if (worst != 0.0) {
    throw Error(ErrorCode::Codec,
                "residual identity violated: max reconstruction error " +
                    std::to_string(worst));
  }

  session.residual_stats = residual_stats(session.normalized_mix, residual);

  EncodeProfile residual_profile = ladder.residual;
  residual_profile.bitrate_kbps = options.residual_bitrate_kbps;
  session.residual = lossy_encode(residual, residual_profile);

  if (options.metadata) {
    session.metadata = *options.metadata;
  } else {
    std::vector<StemKind> kinds;
    std::map<StemKind, int> bitrates;
    for (const auto& [kind, stream] : session.stems) {
      kinds.push_back(kind);
      bitrates[kind] = stream.nominal_bitrate_kbps;
    }
    session.metadata = default_metadata(kinds, bitrates);
  }
  return session;
}

std::vector<uint8_t> session_to_bytes(const EncodeSession& session) {
  return mux_to_bytes(session.stems, session.residual, session.metadata);
}

DecodedFile decode_file(const SncFile& file, double ceiling_dbfs) {
  std::map<StemKind, std::future<AudioBuffer>> decoding;
  for (const auto& [kind, stream] : file.streams) {
    decoding.emplace(kind, std::async(std::launch::async, [&stream] {
                       return lossy_decode(stream);
                     }));
  }
  std::map<StemKind, AudioBuffer> stems;
  for (auto& [kind, task] : decoding) {
    stems.emplace(kind, task.get());
  }

  DecodedFile out{StemSet(std::move(stems)), lossy_decode(file.residual_stream),
                  AudioBuffer()};
  out.reconstruction = reconstruct(out.stems, out.residual, ceiling_dbfs);
  return out;
}

}  // namespace snc
