#include "snc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "snc/errors.hpp"

namespace snc {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

struct FmtChunk {
  uint16_t format_tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::Format, path.string() + " is not a RIFF/WAVE file");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  size_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    char id[5] = {0};
    std::memcpy(id, bytes.data() + pos, 4);
    uint32_t size = read_u32(bytes.data() + pos + 4);
    size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw Error(ErrorCode::Format, "chunk '" + std::string(id) + "' is truncated",
                  pos);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) {
        throw Error(ErrorCode::Format, "fmt chunk too small", pos);
      }
      const uint8_t* p = bytes.data() + body;
      fmt.format_tag = read_u16(p);
      fmt.channels = read_u16(p + 2);
      fmt.sample_rate = read_u32(p + 4);
      fmt.bits_per_sample = read_u16(p + 14);
      if (fmt.format_tag == kFormatExtensible) {
        // SubFormat GUID begins with the equivalent plain tag.
        if (size < 40) {
          throw Error(ErrorCode::Format, "extensible fmt chunk too small", pos);
        }
        fmt.format_tag = read_u16(p + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) {
    throw Error(ErrorCode::Format, "missing fmt chunk in " + path.string());
  }
  if (data == nullptr) {
    throw Error(ErrorCode::Format, "missing data chunk in " + path.string());
  }
  if (fmt.channels < 1 || fmt.channels > 2) {
    throw Error(ErrorCode::Unsupported,
                "unsupported channel count " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) {
    throw Error(ErrorCode::Format, "sample rate is zero");
  }

  const int channels = fmt.channels;
  size_t bytes_per_sample = 0;
  if (fmt.format_tag == kFormatPcm) {
    if (fmt.bits_per_sample != 16 && fmt.bits_per_sample != 24 &&
        fmt.bits_per_sample != 32) {
      throw Error(ErrorCode::Unsupported,
                  "unsupported PCM depth " + std::to_string(fmt.bits_per_sample));
    }
    bytes_per_sample = fmt.bits_per_sample / 8;
  } else if (fmt.format_tag == kFormatFloat) {
    if (fmt.bits_per_sample != 32) {
      throw Error(ErrorCode::Unsupported,
                  "unsupported float depth " + std::to_string(fmt.bits_per_sample));
    }
    bytes_per_sample = 4;
  } else {
    throw Error(ErrorCode::Unsupported,
                "unsupported format tag " + std::to_string(fmt.format_tag));
  }

  const size_t frame_size = bytes_per_sample * static_cast<size_t>(channels);
  if (data_size % frame_size != 0) {
    throw Error(ErrorCode::Format, "data chunk is not a whole number of frames");
  }
  const size_t frames = data_size / frame_size;

  AudioBuffer out(static_cast<int>(fmt.sample_rate), channels, frames);
  for (int c = 0; c < channels; ++c) {
    auto ch = out.channel(c);
    const uint8_t* p = data + static_cast<size_t>(c) * bytes_per_sample;
    if (fmt.format_tag == kFormatFloat) {
      for (size_t i = 0; i < frames; ++i, p += frame_size) {
        float f;
        std::memcpy(&f, p, 4);
        ch[i] = static_cast<double>(f);
      }
    } else if (fmt.bits_per_sample == 16) {
      for (size_t i = 0; i < frames; ++i, p += frame_size) {
        auto v = static_cast<int16_t>(read_u16(p));
        ch[i] = static_cast<double>(v) / 32768.0;
      }
    } else if (fmt.bits_per_sample == 24) {
      for (size_t i = 0; i < frames; ++i, p += frame_size) {
        uint32_t u = (static_cast<uint32_t>(p[0]) << 8) |
                     (static_cast<uint32_t>(p[1]) << 16) |
                     (static_cast<uint32_t>(p[2]) << 24);
        ch[i] = static_cast<double>(static_cast<int32_t>(u) >> 8) / 8388608.0;
      }
    } else {
      for (size_t i = 0; i < frames; ++i, p += frame_size) {
        auto v = static_cast<int32_t>(read_u32(p));
        ch[i] = static_cast<double>(v) / 2147483648.0;
      }
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
               WavFormat format) {
  const int channels = buffer.channels() == 0 ? 1 : buffer.channels();
  const size_t frames = buffer.length();

  uint16_t format_tag = kFormatPcm;
  uint16_t bits = 16;
  switch (format) {
    case WavFormat::Pcm16: bits = 16; break;
    case WavFormat::Pcm24: bits = 24; break;
    case WavFormat::Float32: format_tag = kFormatFloat; bits = 32; break;
  }
  const size_t bytes_per_sample = bits / 8;
  const size_t frame_size = bytes_per_sample * static_cast<size_t>(channels);
  const size_t data_size = frames * frame_size;

  std::vector<uint8_t> out;
  out.reserve(data_size + 64);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 0);  // patched below
  out.insert(out.end(), {'W', 'A', 'V', 'E'});

  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, format_tag);
  put_u16(out, static_cast<uint16_t>(channels));
  put_u32(out, static_cast<uint32_t>(buffer.sample_rate()));
  put_u32(out, static_cast<uint32_t>(buffer.sample_rate() * frame_size));
  put_u16(out, static_cast<uint16_t>(frame_size));
  put_u16(out, bits);

  if (format_tag == kFormatFloat) {
    // fact chunk is required for non-PCM data.
    out.insert(out.end(), {'f', 'a', 'c', 't'});
    put_u32(out, 4);
    put_u32(out, static_cast<uint32_t>(frames));
  }

  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, static_cast<uint32_t>(data_size));

  for (size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      double s = buffer.channel(c)[i];
      switch (format) {
        case WavFormat::Pcm16: {
          auto v = static_cast<int64_t>(std::llround(s * 32768.0));
          v = std::clamp<int64_t>(v, -32768, 32767);
          put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
          break;
        }
        case WavFormat::Pcm24: {
          auto v = static_cast<int64_t>(std::llround(s * 8388608.0));
          v = std::clamp<int64_t>(v, -8388608, 8388607);
          auto u = static_cast<uint32_t>(static_cast<int32_t>(v));
          out.push_back(static_cast<uint8_t>(u & 0xFF));
          out.push_back(static_cast<uint8_t>((u >> 8) & 0xFF));
          out.push_back(static_cast<uint8_t>((u >> 16) & 0xFF));
          break;
        }
        case WavFormat::Float32: {
          auto f = static_cast<float>(s);
          uint32_t u;
          std::memcpy(&u, &f, 4);
          put_u32(out, u);
          break;
        }
      }
    }
  }

  const uint32_t riff_size = static_cast<uint32_t>(out.size() - 8);
  out[4] = static_cast<uint8_t>(riff_size & 0xFF);
  out[5] = static_cast<uint8_t>((riff_size >> 8) & 0xFF);
  out[6] = static_cast<uint8_t>((riff_size >> 16) & 0xFF);
  out[7] = static_cast<uint8_t>((riff_size >> 24) & 0xFF);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw Error(ErrorCode::Io, "short write to " + path.string());
  }
}

}  // namespace snc
