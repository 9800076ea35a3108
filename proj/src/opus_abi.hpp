#pragma once

#include <cstdint>

// libopus is present on this system only as a runtime object (no development
// headers), so the small, long-stable slice of its ABI we rely on is declared
// here by hand. The constants are the wire values from the public opus_defines
// listing; codec_opus.cpp sanity-checks the loaded library version at first
// use. Everything below has been ABI-frozen in libopus since 1.0.

extern "C" {

typedef struct OpusEncoder OpusEncoder;
typedef struct OpusDecoder OpusDecoder;

OpusEncoder* opus_encoder_create(int32_t fs, int channels, int application,
                                 int* error);
void opus_encoder_destroy(OpusEncoder* enc);
int opus_encoder_ctl(OpusEncoder* enc, int request, ...);
int32_t opus_encode_float(OpusEncoder* enc, const float* pcm, int frame_size,
                          unsigned char* data, int32_t max_data_bytes);

OpusDecoder* opus_decoder_create(int32_t fs, int channels, int* error);
void opus_decoder_destroy(OpusDecoder* dec);
int opus_decode_float(OpusDecoder* dec, const unsigned char* data, int32_t len,
                      float* pcm, int frame_size, int decode_fec);

int opus_packet_get_nb_samples(const unsigned char* packet, int32_t len,
                               int32_t fs);
const char* opus_get_version_string(void);

}  // extern "C"

namespace snc::opus_abi {

inline constexpr int kOk = 0;

inline constexpr int kApplicationAudio = 2049;
inline constexpr int kSignalMusic = 3002;

inline constexpr int kSetBitrate = 4002;
inline constexpr int kSetVbr = 4006;
inline constexpr int kSetComplexity = 4010;
inline constexpr int kSetInbandFec = 4012;
inline constexpr int kSetPacketLossPerc = 4014;
inline constexpr int kSetVbrConstraint = 4020;
inline constexpr int kSetSignal = 4024;
inline constexpr int kGetLookahead = 4027;
inline constexpr int kSetLsbDepth = 4036;
inline constexpr int kSetPhaseInversionDisabled = 4046;

}  // namespace snc::opus_abi
