#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace snc {

enum class ErrorCode {
  Argument,     // caller violated a precondition
  Format,       // malformed input file
  Unsupported,  // recognized input that is out of scope
  Io,           // filesystem failure
  Codec,        // backend encode/decode failure
  Alignment,    // buffers that must agree in length/rate do not
  Schema,       // metadata or track layout violates the container schema
  Parse,        // container bytes unreadable
  NotSnc,       // valid Matroska, but not an SNC file
  Undefined,    // metric undefined for this input (e.g. silent reference)
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  // Parse-type errors carry the absolute file offset where reading failed.
  Error(ErrorCode code, const std::string& message, uint64_t byte_offset);

  ErrorCode code() const noexcept { return code_; }
  std::optional<uint64_t> byte_offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<uint64_t> offset_;
};

}  // namespace snc
