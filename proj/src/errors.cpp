#include "snc/errors.hpp"

namespace snc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Argument: return "argument";
    case ErrorCode::Format: return "format";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Io: return "io";
    case ErrorCode::Codec: return "codec";
    case ErrorCode::Alignment: return "alignment";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::NotSnc: return "not-snc";
    case ErrorCode::Undefined: return "undefined";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message),
      code_(code) {}

Error::Error(ErrorCode code, const std::string& message, uint64_t byte_offset)
    : std::runtime_error(std::string(to_string(code)) + " error at byte " +
                         std::to_string(byte_offset) + ": " + message),
      code_(code),
      offset_(byte_offset) {}

}  // namespace snc
