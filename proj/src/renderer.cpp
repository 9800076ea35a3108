#include "snc/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "snc/errors.hpp"
#include "snc/loudness.hpp"
#include "snc/residual.hpp"

namespace snc {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_db(double db) {
  if (db == -kInf) return "-inf dB (mute)";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%+.1f dB", db);
  return buf;
}

std::string format_compressor(const CompressorSettings& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "compressor %.3g:1 @ %.1f dBFS", c.ratio,
                c.threshold_db);
  return buf;
}

bool condition_matches(const RuleCondition& condition, const Environment& env) {
  if (condition.noise_level &&
      (!env.noise_level || *env.noise_level != *condition.noise_level)) {
    return false;
  }
  if (condition.speaker_type &&
      (!env.speaker_type || *env.speaker_type != *condition.speaker_type)) {
    return false;
  }
  return true;
}

}  // namespace

Environment environment_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema,
                std::string("environment profile is not valid JSON: ") +
                    e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::Schema, "environment profile must be an object");
  }

  Environment env;
  for (const auto& [key, value] : doc.items()) {
    if (key == "noise_level") {
      if (!value.is_string()) {
        throw Error(ErrorCode::Schema, "noise_level must be a string");
      }
      env.noise_level = noise_level_from_label(value.get<std::string>());
      if (!env.noise_level) {
        throw Error(ErrorCode::Schema, "unknown noise_level \"" +
                                           value.get<std::string>() + "\"");
      }
    } else if (key == "speaker_type") {
      if (!value.is_string()) {
        throw Error(ErrorCode::Schema, "speaker_type must be a string");
      }
      env.speaker_type = speaker_type_from_label(value.get<std::string>());
      if (!env.speaker_type) {
        throw Error(ErrorCode::Schema, "unknown speaker_type \"" +
                                           value.get<std::string>() + "\"");
      }
    } else {
      throw Error(ErrorCode::Schema,
                  "unknown environment profile key \"" + key + "\"");
    }
  }
  return env;
}

bool ResolvedMixPlan::is_identity() const {
  for (const auto& [kind, plan] : stems) {
    if (plan.gain_db != 0.0 || plan.compressor.has_value()) return false;
  }
  return true;
}

std::string plan_to_json(const ResolvedMixPlan& plan, bool pretty) {
  json doc;
  doc["identity"] = plan.is_identity();
  doc["stems"] = json::object();
  for (const auto& [kind, stem] : plan.stems) {
    json entry;
    if (stem.gain_db == -kInf) {
      entry["gain_db"] = "-inf";
    } else {
      entry["gain_db"] = stem.gain_db;
    }
    if (stem.compressor) {
      entry["compressor"] = {{"ratio", stem.compressor->ratio},
                             {"threshold_db", stem.compressor->threshold_db}};
    } else {
      entry["compressor"] = nullptr;
    }
    doc["stems"][std::string(to_label(kind))] = std::move(entry);
  }
  doc["applied_rules"] = plan.applied_rules;
  doc["denials"] = json::array();
  for (const auto& d : plan.denials) {
    doc["denials"].push_back({{"stem", std::string(to_label(d.stem))},
                              {"requested", d.requested},
                              {"reason", d.reason}});
  }
  return pretty ? doc.dump(2) + "\n" : doc.dump();
}

ResolvedMixPlan resolve_plan(const MixRequest& request,
                             const SncMetadata& metadata) {
  for (const auto& [kind, gain] : request.gain_db) {
    if (!std::isfinite(gain)) {
      throw Error(ErrorCode::Argument,
                  "requested gain for " + std::string(to_label(kind)) +
                      " must be finite (use mute instead of -inf)");
    }
  }

  ResolvedMixPlan plan;

  // (1) User gains for the stems this file actually has; mute outranks a
  // finite gain request. Requests naming absent stems are denied as data.
  for (const auto& descriptor : metadata.stems) {
    const auto kind = stem_from_label(descriptor.name);
    if (!kind) continue;  // unreachable on validated metadata
    StemPlan stem;
    auto it = request.gain_db.find(*kind);
    if (it != request.gain_db.end()) stem.gain_db = it->second;
    if (request.mute.count(*kind)) stem.gain_db = -kInf;
    plan.stems[*kind] = stem;
  }
  for (StemKind kind : kAllStemKinds) {
    if (plan.stems.count(kind)) continue;
    const bool asked =
        request.gain_db.count(kind) != 0 || request.mute.count(kind) != 0;
    if (asked) {
      const double g = request.mute.count(kind)
                           ? -kInf
                           : request.gain_db.at(kind);
      plan.denials.push_back(
          {kind, format_db(g), "stem not present in this file"});
    }
  }

  // (2) Adaptive rules, in metadata order. Gains accumulate; for a
  // compressor the last matching rule per stem wins; EQ is not rendered.
  // Actions naming stems the file lacks do nothing.
  for (size_t i = 0; i < metadata.adaptive_rules.size(); ++i) {
    const auto& rule = metadata.adaptive_rules[i];
    if (!condition_matches(rule.condition, request.environment)) continue;
    plan.applied_rules.push_back("adaptive_rules[" + std::to_string(i) + "]");
    for (const auto& action : rule.actions) {
      auto it = plan.stems.find(action.stem);
      if (it == plan.stems.end()) continue;
      switch (action.kind) {
        case RuleAction::Kind::Gain:
          it->second.gain_db += action.value_db;
          break;
        case RuleAction::Kind::Compress:
          it->second.compressor =
              CompressorSettings{action.ratio, action.threshold_db};
          break;
        case RuleAction::Kind::Eq: {
          char requested[48];
          std::snprintf(requested, sizeof requested, "eq %.0f Hz",
                        action.freq_hz);
          plan.denials.push_back(
              {action.stem, requested, "eq actions are not rendered"});
          break;
        }
      }
    }
  }

  // (3)-(5) Permissions: clamp, immutability, dynamics protection.
  for (const auto& descriptor : metadata.stems) {
    const auto kind = stem_from_label(descriptor.name);
    if (!kind) continue;
    const auto& permissions = descriptor.permissions;
    StemPlan& stem = plan.stems.at(*kind);

    // Mute is exempt from range clamping: it is an on/off request governed
    // by mutability alone, not a level inside the artistic window.
    if (std::isfinite(stem.gain_db)) {
      const double lo = permissions.gain_min_db;
      const double hi = permissions.gain_max_db;
      if (stem.gain_db < lo || stem.gain_db > hi) {
        char reason[80];
        std::snprintf(reason, sizeof reason, "clamped to [%+.1f, %+.1f] dB",
                      lo, hi);
        plan.denials.push_back({*kind, format_db(stem.gain_db), reason});
        stem.gain_db = std::clamp(stem.gain_db, lo, hi);
      }
    }

    if (!permissions.is_mutable && stem.gain_db != 0.0) {
      plan.denials.push_back(
          {*kind, format_db(stem.gain_db), "stem is immutable"});
      stem.gain_db = 0.0;
    }

    if (permissions.preserve_dynamics && stem.compressor) {
      plan.denials.push_back({*kind, format_compressor(*stem.compressor),
                              "stem preserves dynamics"});
      stem.compressor.reset();
    }
  }
  return plan;
}

AudioBuffer apply_compressor(const AudioBuffer& buffer, double ratio,
                             double threshold_db) {
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCode::Argument, "compression ratio must be >= 1");
  }
  if (!std::isfinite(threshold_db)) {
    throw Error(ErrorCode::Argument, "compression threshold must be finite");
  }
  AudioBuffer out = buffer;
  if (ratio == 1.0 || buffer.empty()) return out;

  const double fs = buffer.sample_rate();
  const double attack = 1.0 - std::exp(-1.0 / (fs * 0.005));
  const double release = 1.0 - std::exp(-1.0 / (fs * 0.050));
  const double slope = 1.0 - 1.0 / ratio;  // dB of reduction per dB over

  double envelope = 0.0;
  for (size_t i = 0; i < buffer.length(); ++i) {
    double peak = 0.0;
    for (int c = 0; c < buffer.channels(); ++c) {
      peak = std::max(peak, std::abs(buffer.channel(c)[i]));
    }
    envelope += (peak > envelope ? attack : release) * (peak - envelope);

    double gain = 1.0;
    if (envelope > 0.0) {
      const double over = linear_to_db(envelope) - threshold_db;
      if (over > 0.0) gain = db_to_linear(-over * slope);
    }
    for (int c = 0; c < buffer.channels(); ++c) {
      out.channel(c)[i] = buffer.channel(c)[i] * gain;
    }
  }
  return out;
}

AudioBuffer render(const StemSet& stems, const AudioBuffer* residual,
                   const ResolvedMixPlan& plan, double ceiling_dbfs) {
  if (stems.empty()) {
    throw Error(ErrorCode::Argument, "render needs at least one stem");
  }

  // Restrict the identity test to the stems we are actually mixing, so a
  // plan whose extra entries refer to other files cannot flip it.
  bool identity = true;
  for (const auto& [kind, buffer] : stems.entries()) {
    auto it = plan.stems.find(kind);
    if (it == plan.stems.end()) continue;
    if (it->second.gain_db != 0.0 || it->second.compressor) identity = false;
  }

  if (identity) {
    // The untouched balance is the one mix the mastering residual belongs
    // to; this path must match the decoder's reconstruction bit for bit.
    if (residual != nullptr) return reconstruct(stems, *residual, ceiling_dbfs);
    return apply_peak_ceiling(procedural_mix(stems), ceiling_dbfs);
  }

  AudioBuffer out(stems.sample_rate(), stems.channels(), stems.length());
  for (const auto& [kind, buffer] : stems.entries()) {
    StemPlan stem;
    auto it = plan.stems.find(kind);
    if (it != plan.stems.end()) stem = it->second;
    if (stem.gain_db == -kInf) continue;  // muted: contributes nothing

    AudioBuffer processed = apply_gain(buffer, db_to_linear(stem.gain_db));
    if (stem.compressor) {
      processed = apply_compressor(processed, stem.compressor->ratio,
                                   stem.compressor->threshold_db);
    }
    out = add(out, processed);
  }
  return apply_peak_ceiling(out, ceiling_dbfs);
}

}  // namespace snc
