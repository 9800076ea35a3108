#pragma once

// Minimal EBML primitives: enough to write and read back the element subset
// the container uses. Format knowledge (which IDs mean what) stays in
// container.cpp; this layer only handles framing.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace snc::ebml {

// One parsed element. `payload` points into the buffer the Reader walks;
// offsets are absolute file positions for error reporting.
struct Element {
  uint32_t id = 0;
  size_t id_offset = 0;
  const uint8_t* payload = nullptr;
  uint64_t size = 0;
  size_t payload_offset = 0;
};

// Walks a contiguous run of elements inside fixed bounds. Malformed framing
// throws a parse error carrying the absolute offset.
class Reader {
 public:
  Reader(const uint8_t* data, size_t size, size_t abs_offset = 0)
      : data_(data), size_(size), abs_(abs_offset) {}

  bool at_end() const { return pos_ >= size_; }
  size_t offset() const { return abs_ + pos_; }

  // Advances past one element. Returns false exactly at the end of the
  // bounds; anything unreadable before that throws.
  bool next(Element& out);

 private:
  uint64_t read_vint(bool keep_marker, const char* what);

  const uint8_t* data_;
  size_t size_;
  size_t abs_;
  size_t pos_ = 0;
};

// Bounded reader over a master element's children.
Reader sub_reader(const Element& e);

// Payload decoders. Each validates the size it can accept.
uint64_t uint_value(const Element& e);
int64_t sint_value(const Element& e);
double float_value(const Element& e);
std::string string_value(const Element& e);

// Append-only element writer. Sizes are always minimal-length, so identical
// input produces identical bytes.
class Writer {
 public:
  const std::vector<uint8_t>& bytes() const { return out_; }
  std::vector<uint8_t> take() { return std::move(out_); }

  void element_uint(uint32_t id, uint64_t value);
  void element_sint(uint32_t id, int64_t value);
  void element_float(uint32_t id, double value);  // 8-byte IEEE
  void element_string(uint32_t id, std::string_view value);
  void element_binary(uint32_t id, const uint8_t* data, size_t size);
  void element_master(uint32_t id, const std::vector<uint8_t>& payload);

  void raw_id(uint32_t id);
  void raw_vint(uint64_t value);
  void raw_bytes(const uint8_t* data, size_t size);

 private:
  std::vector<uint8_t> out_;
};

// Track-number VINT for block framing (same wire format as a size VINT).
void append_vint(std::vector<uint8_t>& out, uint64_t value);

}  // namespace snc::ebml
