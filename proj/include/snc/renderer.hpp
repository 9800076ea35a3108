#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snc/audio_buffer.hpp"
#include "snc/metadata.hpp"

namespace snc {

// Listener-side playback conditions, matched against AdaptiveRule
// conditions. Unset fields match nothing: a rule that requires a condition
// the environment does not state stays inactive.
struct Environment {
  std::optional<NoiseLevel> noise_level;
  std::optional<SpeakerType> speaker_type;
};

// Parses an environment profile document: a JSON object with optional
// "noise_level" and "speaker_type" string fields using the metadata enum
// labels. Unknown keys or labels are schema errors.
Environment environment_from_json(const std::string& text);

// What the listener asked for. Gains default to 0 dB for unmentioned stems;
// mute outranks a finite gain request for the same stem. Requested gains
// must be finite — mute is the only path to -inf.
struct MixRequest {
  std::map<StemKind, double> gain_db;
  std::set<StemKind> mute;
  Environment environment;
};

struct CompressorSettings {
  double ratio = 1.0;         // n:1, n >= 1
  double threshold_db = 0.0;  // dBFS
};

// One refused (or trimmed) part of a request, kept as data: enforcement
// never throws, it reports.
struct Denial {
  StemKind stem = StemKind::Vocals;
  std::string requested;  // human-readable form of what was asked
  std::string reason;
};

// Per-stem playback instructions after rules and permissions. gain_db of
// -inf means the stem is muted.
struct StemPlan {
  double gain_db = 0.0;
  std::optional<CompressorSettings> compressor;
};

struct ResolvedMixPlan {
  std::map<StemKind, StemPlan> stems;       // one entry per metadata stem
  std::vector<std::string> applied_rules;   // locators, e.g. "adaptive_rules[0]"
  std::vector<Denial> denials;

  // True iff rendering this plan reproduces the original mix: every gain
  // exactly 0 dB, no compressor, no mute.
  bool is_identity() const;
};

// Deterministic JSON rendering of a plan, including denials; -inf gains are
// carried as the string "-inf".
std::string plan_to_json(const ResolvedMixPlan& plan, bool pretty = true);

// Resolves a request against the file's rules and permissions:
//   (1) start from the user's gains (mute = -inf gain request);
//   (2) apply every adaptive rule whose stated conditions all match the
//       request environment, in metadata order — gains add in dB, the last
//       matching compressor per stem wins, EQ actions are recorded as
//       unsupported-action denials;
//   (3) clamp finite gains to the stem's permission bounds;
//   (4) immutable stems are forced back to 0 dB;
//   (5) preserve_dynamics strips any compressor.
// Steps 3-5 record denials. Requests for stems the file does not contain
// are denied as unknown. Non-finite requested gains are argument errors.
ResolvedMixPlan resolve_plan(const MixRequest& request,
                             const SncMetadata& metadata);

// Static-characteristic feed-forward compressor: peak envelope with 5 ms
// attack / 50 ms release one-pole smoothing, shared across channels so the
// image does not wander; hard knee at threshold_db, gain reduction by
// ratio above it. Ratio 1 is the identity. Ratio below 1 is an argument
// error.
AudioBuffer apply_compressor(const AudioBuffer& buffer, double ratio,
                             double threshold_db);

// Renders the plan: per-stem gain then compressor, summed in StemKind
// ordinal order, residual added only for an identity plan (a remixed
// balance invalidates the mastering correction), peak ceiling applied
// last. An identity plan with a residual reproduces reconstruct() exactly.
// Stems absent from the plan pass through unchanged.
AudioBuffer render(const StemSet& stems, const AudioBuffer* residual,
                   const ResolvedMixPlan& plan, double ceiling_dbfs = -0.1);

}  // namespace snc
