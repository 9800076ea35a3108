#include "ebml.hpp"

#include <bit>
#include <cstring>

#include "snc/errors.hpp"

namespace snc::ebml {

namespace {

int vint_octets(uint64_t value) {
  // Smallest width whose all-ones pattern (reserved for "unknown") is
  // still above the value.
  for (int n = 1; n <= 8; ++n) {
    if (value < (uint64_t{1} << (7 * n)) - 1) return n;
  }
  throw Error(ErrorCode::Argument, "value too large for a size field");
}

int id_octets(uint32_t id) {
  if (id <= 0xFF) return 1;
  if (id <= 0xFFFF) return 2;
  if (id <= 0xFFFFFF) return 3;
  return 4;
}

int uint_octets(uint64_t value) {
  int n = 1;
  while (value >> (8 * n) != 0 && n < 8) ++n;
  return n;
}

int sint_octets(int64_t value) {
  for (int n = 1; n < 8; ++n) {
    const int64_t lo = -(int64_t{1} << (8 * n - 1));
    const int64_t hi = (int64_t{1} << (8 * n - 1)) - 1;
    if (value >= lo && value <= hi) return n;
  }
  return 8;
}

void append_big_endian(std::vector<uint8_t>& out, uint64_t value, int octets) {
  for (int i = octets - 1; i >= 0; --i) {
    out.push_back(static_cast<uint8_t>(value >> (8 * i)));
  }
}

}  // namespace

bool Reader::next(Element& out) {
  if (pos_ >= size_) return false;
  out.id_offset = offset();
  out.id = static_cast<uint32_t>(read_vint(/*keep_marker=*/true, "element id"));
  out.size = read_vint(/*keep_marker=*/false, "element size");
  out.payload_offset = offset();
  if (out.size > size_ - pos_) {
    throw Error(ErrorCode::Parse,
                "element overruns its parent (size " + std::to_string(out.size) +
                    ", " + std::to_string(size_ - pos_) + " bytes left)",
                out.payload_offset);
  }
  out.payload = data_ + pos_;
  pos_ += out.size;
  return true;
}

uint64_t Reader::read_vint(bool keep_marker, const char* what) {
  const size_t at = offset();
  if (pos_ >= size_) {
    throw Error(ErrorCode::Parse, std::string("truncated ") + what, at);
  }
  const uint8_t b0 = data_[pos_];
  if (b0 == 0) {
    throw Error(ErrorCode::Parse, std::string("invalid ") + what, at);
  }
  const int len = std::countl_zero(b0) + 1;  // 1..8
  if (keep_marker && len > 4) {
    throw Error(ErrorCode::Parse, std::string("oversized ") + what, at);
  }
  if (pos_ + static_cast<size_t>(len) > size_) {
    throw Error(ErrorCode::Parse, std::string("truncated ") + what, at);
  }
  uint64_t value = keep_marker ? b0 : b0 & (0xFFu >> len);
  for (int i = 1; i < len; ++i) {
    value = value << 8 | data_[pos_ + i];
  }
  if (!keep_marker && value == (uint64_t{1} << (7 * len)) - 1) {
    throw Error(ErrorCode::Parse, "unknown-size elements are not supported", at);
  }
  pos_ += len;
  return value;
}

Reader sub_reader(const Element& e) {
  return Reader(e.payload, e.size, e.payload_offset);
}

uint64_t uint_value(const Element& e) {
  if (e.size > 8) {
    throw Error(ErrorCode::Parse, "integer payload wider than 8 bytes",
                e.payload_offset);
  }
  uint64_t value = 0;
  for (uint64_t i = 0; i < e.size; ++i) value = value << 8 | e.payload[i];
  return value;
}

int64_t sint_value(const Element& e) {
  if (e.size == 0) return 0;
  if (e.size > 8) {
    throw Error(ErrorCode::Parse, "integer payload wider than 8 bytes",
                e.payload_offset);
  }
  uint64_t value = e.payload[0] & 0x80 ? ~uint64_t{0} : 0;  // sign-extend
  for (uint64_t i = 0; i < e.size; ++i) value = value << 8 | e.payload[i];
  return static_cast<int64_t>(value);
}

double float_value(const Element& e) {
  if (e.size == 0) return 0.0;
  if (e.size == 4) {
    uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits = bits << 8 | e.payload[i];
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
  }
  if (e.size == 8) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits = bits << 8 | e.payload[i];
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
  throw Error(ErrorCode::Parse, "float payload must be 0, 4, or 8 bytes",
              e.payload_offset);
}

std::string string_value(const Element& e) {
  size_t n = e.size;
  while (n > 0 && e.payload[n - 1] == 0) --n;  // strip padding
  return std::string(reinterpret_cast<const char*>(e.payload), n);
}

void Writer::element_uint(uint32_t id, uint64_t value) {
  raw_id(id);
  const int n = uint_octets(value);
  raw_vint(static_cast<uint64_t>(n));
  append_big_endian(out_, value, n);
}

void Writer::element_sint(uint32_t id, int64_t value) {
  raw_id(id);
  const int n = sint_octets(value);
  raw_vint(static_cast<uint64_t>(n));
  append_big_endian(out_, static_cast<uint64_t>(value), n);
}

void Writer::element_float(uint32_t id, double value) {
  raw_id(id);
  raw_vint(8);
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  append_big_endian(out_, bits, 8);
}

void Writer::element_string(uint32_t id, std::string_view value) {
  element_binary(id, reinterpret_cast<const uint8_t*>(value.data()),
                 value.size());
}

void Writer::element_binary(uint32_t id, const uint8_t* data, size_t size) {
  raw_id(id);
  raw_vint(size);
  raw_bytes(data, size);
}

void Writer::element_master(uint32_t id, const std::vector<uint8_t>& payload) {
  element_binary(id, payload.data(), payload.size());
}

void Writer::raw_id(uint32_t id) {
  append_big_endian(out_, id, id_octets(id));
}

void Writer::raw_vint(uint64_t value) {
  append_vint(out_, value);
}

void Writer::raw_bytes(const uint8_t* data, size_t size) {
  out_.insert(out_.end(), data, data + size);
}

void append_vint(std::vector<uint8_t>& out, uint64_t value) {
  const int n = vint_octets(value);
  append_big_endian(out, value | uint64_t{1} << (7 * n), n);
}

}  // namespace snc::ebml
