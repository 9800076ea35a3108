#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snc/audio_buffer.hpp"

namespace snc {

// The JSON attachment schema, version 1. Field names here mirror the JSON
// keys one-to-one; docs/metadata-schema.md is the normative description.

struct ReverbInfo {
  std::string type = "none";
  double decay_s = 0.0;
  double predelay_ms = 0.0;
  double wet = 0.0;
};

struct SpatialInfo {
  double position[3] = {0.0, 0.0, 0.0};  // x, y, z in [-1, 1]
  double spread_deg = 60.0;              // source width, [0, 360]
  ReverbInfo reverb;
};

struct FreqBand {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

struct PermissionEntry {
  bool is_mutable = true;  // may the listener change this stem's level?
  double gain_min_db = -12.0;
  double gain_max_db = 12.0;
  std::vector<FreqBand> freq_locks;  // protected spectral regions
  bool preserve_dynamics = false;    // forbid compression on this stem
};

struct StemDescriptor {
  std::string name;  // StemKind label
  int track = 0;     // 1-based container track index
  int bitrate_kbps = 0;
  SpatialInfo spatial;
  PermissionEntry permissions;
};

enum class NoiseLevel { Low, Medium, High };
enum class SpeakerType { Studio, Headphones, Phone, Laptop };

struct RuleCondition {
  std::optional<NoiseLevel> noise_level;
  std::optional<SpeakerType> speaker_type;
};

struct RuleAction {
  enum class Kind { Gain, Compress, Eq };
  StemKind stem = StemKind::Vocals;
  Kind kind = Kind::Gain;
  double value_db = 0.0;      // gain
  double ratio = 1.0;         // compress, n:1
  double threshold_db = 0.0;  // compress, dBFS
  double freq_hz = 0.0;       // eq (parsed and validated; not rendered in v1)
  double q = 1.0;             // eq
};

struct AdaptiveRule {
  RuleCondition condition;
  std::vector<RuleAction> actions;
};

struct SncMetadata {
  int version = 1;
  double loudness_target_lufs = -16.0;
  std::vector<StemDescriptor> stems;
  int residual_track = 0;
  std::vector<AdaptiveRule> adaptive_rules;
};

// A schema violation: where (JSON-path-like locator) and what.
struct Violation {
  std::string path;
  std::string message;
};

// Empty result iff every schema invariant holds. Violations are data, not
// errors — inspect prints them, the muxer refuses on them.
std::vector<Violation> validate_metadata(const SncMetadata& metadata);

// Descriptors for the given stems (track 1..N in ordinal order, residual
// N+1), house spatial defaults, permissive permissions, and the stock
// noisy-environment rule (vocals +4 dB, drums 3:1 compression).
SncMetadata default_metadata(const std::vector<StemKind>& stems,
                             const std::map<StemKind, int>& bitrates);

// JSON (de)serialization. Parsing rejects structurally malformed documents
// (wrong types, unknown enum strings) with a schema error; range problems
// are left to validate_metadata.
SncMetadata metadata_from_json(const std::string& text);
std::string metadata_to_json(const SncMetadata& metadata, bool pretty = false);

const char* to_label(NoiseLevel level);
const char* to_label(SpeakerType type);
std::optional<NoiseLevel> noise_level_from_label(const std::string& label);
std::optional<SpeakerType> speaker_type_from_label(const std::string& label);

}  // namespace snc
