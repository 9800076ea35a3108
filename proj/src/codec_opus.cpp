#include <cmath>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "opus_abi.hpp"
#include "snc/codec.hpp"
#include "snc/errors.hpp"

namespace snc {

namespace {

bool rate_supported(int fs) {
  return fs == 8000 || fs == 12000 || fs == 16000 || fs == 24000 || fs == 48000;
}

void ctl_or_throw(OpusEncoder* enc, int request, int32_t value,
                  const char* what) {
  if (opus_encoder_ctl(enc, request, value) != opus_abi::kOk) {
    throw Error(ErrorCode::Codec, std::string("encoder rejected ") + what);
  }
}

class OpusCodec final : public LossyCodec {
 public:
  OpusCodec() {
    // Fail loudly at first use if the runtime library is not what the
    // hand-declared ABI in opus_abi.hpp was written against.
    const char* version = opus_get_version_string();
    if (version == nullptr || std::strncmp(version, "libopus 1.", 10) != 0) {
      throw Error(ErrorCode::Codec,
                  std::string("unexpected opus runtime: ") +
                      (version != nullptr ? version : "(null)"));
    }
  }

  std::string_view id() const override { return "opus"; }

  EncodedStream encode(const AudioBuffer& buffer,
                       const EncodeProfile& profile) const override {
    if (!rate_supported(buffer.sample_rate())) {
      throw Error(ErrorCode::Argument,
                  "sample rate " + std::to_string(buffer.sample_rate()) +
                      " is not codec-native; resample first");
    }
    const int fs = buffer.sample_rate();
    const int channels = std::max(buffer.channels(), 1);

    int err = 0;
    std::unique_ptr<OpusEncoder, void (*)(OpusEncoder*)> enc(
        opus_encoder_create(fs, channels, opus_abi::kApplicationAudio, &err),
        opus_encoder_destroy);
    if (err != opus_abi::kOk || enc == nullptr) {
      throw Error(ErrorCode::Codec,
                  "encoder creation failed (status " + std::to_string(err) + ")");
    }

    ctl_or_throw(enc.get(), opus_abi::kSetBitrate,
                 profile.bitrate_kbps * 1000, "bitrate");
    ctl_or_throw(enc.get(), opus_abi::kSetVbr, 1, "vbr");
    ctl_or_throw(enc.get(), opus_abi::kSetVbrConstraint,
                 profile.constrained_vbr ? 1 : 0, "vbr constraint");
    ctl_or_throw(enc.get(), opus_abi::kSetComplexity, profile.complexity,
                 "complexity");
    ctl_or_throw(enc.get(), opus_abi::kSetPacketLossPerc, 0, "loss expectation");
    ctl_or_throw(enc.get(), opus_abi::kSetInbandFec, 0, "fec");
    if (profile.music_hint) {
      ctl_or_throw(enc.get(), opus_abi::kSetSignal, opus_abi::kSignalMusic,
                   "signal hint");
    }
    // Sources are 24-bit masters; also keep channel phase intact since the
    // decoded stems get summed rather than played individually.
    ctl_or_throw(enc.get(), opus_abi::kSetLsbDepth, 24, "lsb depth");
    ctl_or_throw(enc.get(), opus_abi::kSetPhaseInversionDisabled, 1,
                 "phase inversion flag");

    int32_t preskip = 0;
    if (opus_encoder_ctl(enc.get(), opus_abi::kGetLookahead, &preskip) !=
        opus_abi::kOk) {
      throw Error(ErrorCode::Codec, "lookahead query failed");
    }

    const auto frame = static_cast<size_t>(
        std::llround(fs * profile.frame_ms / 1000.0));
    const size_t total = buffer.length();
    // Feed enough whole frames that the decoder can emit preskip + total
    // samples; the pad past the input is silence.
    const size_t n_frames =
        total == 0 ? 0
                   : (total + static_cast<size_t>(preskip) + frame - 1) / frame;

    EncodedStream stream;
    stream.codec_id = "opus";
    stream.sample_rate = fs;
    stream.channels = channels;
    stream.preskip_samples = preskip;
    stream.original_length = total;
    stream.nominal_bitrate_kbps = profile.bitrate_kbps;
    stream.packets.reserve(n_frames);

    std::vector<float> interleaved(frame * static_cast<size_t>(channels), 0.0f);
    std::vector<unsigned char> packet(4000);
    for (size_t f0 = 0; f0 < n_frames * frame; f0 += frame) {
      for (int c = 0; c < channels; ++c) {
        auto src = buffer.channel(c);
        for (size_t i = 0; i < frame; ++i) {
          const size_t idx = f0 + i;
          interleaved[i * channels + c] =
              idx < total ? static_cast<float>(src[idx]) : 0.0f;
        }
      }
      const int32_t n = opus_encode_float(enc.get(), interleaved.data(),
                                          static_cast<int>(frame), packet.data(),
                                          static_cast<int32_t>(packet.size()));
      if (n < 0) {
        throw Error(ErrorCode::Codec,
                    "encode failed with status " + std::to_string(n) +
                        " at frame " + std::to_string(f0 / frame));
      }
      stream.packets.push_back(EncodedPacket{
          std::vector<uint8_t>(packet.begin(), packet.begin() + n),
          static_cast<int>(frame)});
    }
    return stream;
  }

  AudioBuffer decode(const EncodedStream& stream) const override {
    if (!rate_supported(stream.sample_rate)) {
      throw Error(ErrorCode::Argument, "stream sample rate is not codec-native");
    }
    if (stream.packets.empty()) {
      return AudioBuffer(stream.sample_rate,
                         stream.channels > 0 ? stream.channels : 1, 0);
    }

    int err = 0;
    std::unique_ptr<OpusDecoder, void (*)(OpusDecoder*)> dec(
        opus_decoder_create(stream.sample_rate, stream.channels, &err),
        opus_decoder_destroy);
    if (err != opus_abi::kOk || dec == nullptr) {
      throw Error(ErrorCode::Codec,
                  "decoder creation failed (status " + std::to_string(err) + ")");
    }

    const int channels = stream.channels;
    std::vector<float> pcm;
    std::vector<float> frame_buf;
    for (size_t pi = 0; pi < stream.packets.size(); ++pi) {
      const auto& p = stream.packets[pi];
      const int expect = p.samples > 0
                             ? p.samples
                             : opus_packet_get_nb_samples(
                                   p.bytes.data(),
                                   static_cast<int32_t>(p.bytes.size()),
                                   stream.sample_rate);
      if (expect <= 0) {
        throw Error(ErrorCode::Codec,
                    "unreadable packet " + std::to_string(pi));
      }
      frame_buf.resize(static_cast<size_t>(expect) * channels);
      const int n = opus_decode_float(dec.get(), p.bytes.data(),
                                      static_cast<int32_t>(p.bytes.size()),
                                      frame_buf.data(), expect, 0);
      if (n < 0) {
        throw Error(ErrorCode::Codec, "decode failed with status " +
                                          std::to_string(n) + " at packet " +
                                          std::to_string(pi));
      }
      pcm.insert(pcm.end(), frame_buf.begin(),
                 frame_buf.begin() + static_cast<size_t>(n) * channels);
    }

    const size_t decoded = pcm.size() / channels;
    const auto preskip = static_cast<size_t>(stream.preskip_samples);
    const auto want = static_cast<size_t>(stream.original_length);
    if (decoded < preskip + want) {
      throw Error(ErrorCode::Codec,
                  "stream too short: decoded " + std::to_string(decoded) +
                      " samples, need " + std::to_string(preskip + want));
    }

    AudioBuffer out(stream.sample_rate, channels, want);
    for (int c = 0; c < channels; ++c) {
      auto dst = out.channel(c);
      for (size_t i = 0; i < want; ++i) {
        dst[i] = static_cast<double>(pcm[(preskip + i) * channels + c]);
      }
    }
    return out;
  }

  int packet_samples(const std::vector<uint8_t>& packet,
                     int sample_rate) const override {
    if (!rate_supported(sample_rate)) {
      throw Error(ErrorCode::Argument, "sample rate is not codec-native");
    }
    if (packet.empty()) {
      throw Error(ErrorCode::Codec, "empty packet");
    }
    const int n = opus_packet_get_nb_samples(
        packet.data(), static_cast<int32_t>(packet.size()), sample_rate);
    if (n <= 0) {
      throw Error(ErrorCode::Codec,
                  "unreadable packet (status " + std::to_string(n) + ")");
    }
    return n;
  }
};

}  // namespace

const LossyCodec& opus_codec_instance() {
  static const OpusCodec instance;
  return instance;
}

}  // namespace snc
