#include "snc/metadata.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "snc/errors.hpp"

namespace snc {

using nlohmann::json;

const char* to_label(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::Low: return "low";
    case NoiseLevel::Medium: return "medium";
    case NoiseLevel::High: return "high";
  }
  return "?";
}

const char* to_label(SpeakerType type) {
  switch (type) {
    case SpeakerType::Studio: return "studio";
    case SpeakerType::Headphones: return "headphones";
    case SpeakerType::Phone: return "phone";
    case SpeakerType::Laptop: return "laptop";
  }
  return "?";
}

std::optional<NoiseLevel> noise_level_from_label(const std::string& label) {
  for (NoiseLevel v : {NoiseLevel::Low, NoiseLevel::Medium, NoiseLevel::High}) {
    if (label == to_label(v)) return v;
  }
  return std::nullopt;
}

std::optional<SpeakerType> speaker_type_from_label(const std::string& label) {
  for (SpeakerType v : {SpeakerType::Studio, SpeakerType::Headphones,
                        SpeakerType::Phone, SpeakerType::Laptop}) {
    if (label == to_label(v)) return v;
  }
  return std::nullopt;
}

namespace {

void check(bool ok, std::vector<Violation>& out, const std::string& path,
           const std::string& message) {
  if (!ok) out.push_back(Violation{path, message});
}

std::string idx(const std::string& base, size_t i, const char* field) {
  return base + "[" + std::to_string(i) + "]." + field;
}

}  // namespace

std::vector<Violation> validate_metadata(const SncMetadata& m) {
  std::vector<Violation> v;
  check(m.version == 1, v, "version",
        "schema version must be 1, got " + std::to_string(m.version));
  check(!m.stems.empty(), v, "stems", "at least one stem descriptor required");

  std::set<std::string> names;
  std::set<int> tracks;
  for (size_t i = 0; i < m.stems.size(); ++i) {
    const auto& s = m.stems[i];
    const std::string base = "stems[" + std::to_string(i) + "]";
    check(stem_from_label(s.name).has_value(), v, base + ".name",
          "'" + s.name + "' is not a stem label");
    check(names.insert(s.name).second, v, base + ".name",
          "duplicate stem name '" + s.name + "'");
    check(tracks.insert(s.track).second, v, base + ".track",
          "duplicate track index " + std::to_string(s.track));

    const auto& sp = s.spatial;
    for (int a = 0; a < 3; ++a) {
      check(sp.position[a] >= -1.0 && sp.position[a] <= 1.0, v,
            base + ".spatial.position[" + std::to_string(a) + "]",
            "coordinate outside [-1, 1]");
    }
    check(sp.spread_deg >= 0.0 && sp.spread_deg <= 360.0, v,
          base + ".spatial.spread_deg", "spread outside [0, 360]");
    check(sp.reverb.decay_s >= 0.0, v, base + ".spatial.reverb.decay_s",
          "decay must be >= 0");
    check(sp.reverb.predelay_ms >= 0.0, v, base + ".spatial.reverb.predelay_ms",
          "pre-delay must be >= 0");
    check(sp.reverb.wet >= 0.0 && sp.reverb.wet <= 1.0, v,
          base + ".spatial.reverb.wet", "wet fraction outside [0, 1]");

    const auto& p = s.permissions;
    check(p.gain_min_db <= 0.0, v, base + ".permissions.gain_min_db",
          "lower gain bound must be <= 0");
    check(p.gain_max_db >= 0.0, v, base + ".permissions.gain_max_db",
          "upper gain bound must be >= 0");
    for (size_t b = 0; b < p.freq_locks.size(); ++b) {
      const auto& fb = p.freq_locks[b];
      check(fb.low_hz >= 0.0 && fb.low_hz < fb.high_hz && fb.high_hz <= 24000.0,
            v, base + ".permissions.freq_locks[" + std::to_string(b) + "]",
            "band must satisfy 0 <= low < high <= 24000");
    }
  }

  // Track indices 1..N contiguous, residual right after.
  const int n = static_cast<int>(m.stems.size());
  for (int t = 1; t <= n; ++t) {
    check(tracks.count(t) == 1, v, "stems",
          "track indices must be contiguous from 1; missing " + std::to_string(t));
  }
  check(m.residual_track == n + 1, v, "residual_track",
        "must be stem count + 1 = " + std::to_string(n + 1) + ", got " +
            std::to_string(m.residual_track));

  for (size_t i = 0; i < m.adaptive_rules.size(); ++i) {
    const auto& r = m.adaptive_rules[i];
    const std::string base = "adaptive_rules[" + std::to_string(i) + "]";
    check(r.condition.noise_level.has_value() ||
              r.condition.speaker_type.has_value(),
          v, base + ".condition", "at least one condition field required");
    check(!r.actions.empty(), v, base + ".actions",
          "at least one action required");
    for (size_t a = 0; a < r.actions.size(); ++a) {
      const auto& act = r.actions[a];
      const std::string abase = base + ".actions[" + std::to_string(a) + "]";
      if (act.kind == RuleAction::Kind::Gain) {
        check(std::isfinite(act.value_db), v, abase + ".value_db",
              "gain must be finite");
      } else if (act.kind == RuleAction::Kind::Compress) {
        check(act.ratio >= 1.0, v, abase + ".ratio",
              "compression ratio must be >= 1");
        check(std::isfinite(act.threshold_db), v, abase + ".threshold_db",
              "threshold must be finite");
      } else {
        check(act.freq_hz > 0.0 && act.freq_hz <= 24000.0, v, abase + ".freq_hz",
              "eq frequency outside (0, 24000]");
        check(act.q > 0.0, v, abase + ".q", "eq q must be positive");
        check(std::isfinite(act.value_db), v, abase + ".value_db",
              "eq gain must be finite");
      }
    }
  }
  return v;
}

SncMetadata default_metadata(const std::vector<StemKind>& stems,
                             const std::map<StemKind, int>& bitrates) {
  SncMetadata m;
  int track = 1;
  for (StemKind kind : kAllStemKinds) {
    bool present = false;
    for (StemKind s : stems) present = present || s == kind;
    if (!present) continue;

    StemDescriptor d;
    d.name = std::string(to_label(kind));
    d.track = track++;
    auto it = bitrates.find(kind);
    d.bitrate_kbps = it != bitrates.end() ? it->second : 0;
    switch (kind) {
      case StemKind::Vocals:
        d.spatial.position[1] = 0.5;
        d.spatial.spread_deg = 30.0;
        d.spatial.reverb = {"plate", 1.2, 20.0, 0.15};
        break;
      case StemKind::Drums:
        d.spatial.position[1] = -0.3;
        d.spatial.spread_deg = 120.0;
        d.spatial.reverb = {"room", 0.6, 10.0, 0.10};
        break;
      case StemKind::Bass:
        d.spatial.position[1] = -0.5;
        d.spatial.spread_deg = 60.0;
        break;
      case StemKind::Other:
        d.spatial.position[1] = 0.2;
        d.spatial.spread_deg = 180.0;
        d.spatial.reverb = {"hall", 1.8, 30.0, 0.20};
        break;
    }
    m.stems.push_back(std::move(d));
  }
  m.residual_track = track;

  // Stock adaptation: in a loud environment lift the vocals and tighten the
  // drum transients so speech stays intelligible.
  AdaptiveRule noisy;
  noisy.condition.noise_level = NoiseLevel::High;
  RuleAction boost;
  boost.stem = StemKind::Vocals;
  boost.kind = RuleAction::Kind::Gain;
  boost.value_db = 4.0;
  RuleAction squeeze;
  squeeze.stem = StemKind::Drums;
  squeeze.kind = RuleAction::Kind::Compress;
  squeeze.ratio = 3.0;
  squeeze.threshold_db = -20.0;
  noisy.actions = {boost, squeeze};
  m.adaptive_rules.push_back(std::move(noisy));
  return m;
}

namespace {

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw Error(ErrorCode::Schema, "metadata: " + path + " must be a number");
  }
  return j.get<double>();
}

json reverb_to_json(const ReverbInfo& r) {
  return json{{"type", r.type},
              {"decay_s", r.decay_s},
              {"predelay_ms", r.predelay_ms},
              {"wet", r.wet}};
}

json spatial_to_json(const SpatialInfo& s) {
  return json{{"position", {s.position[0], s.position[1], s.position[2]}},
              {"spread_deg", s.spread_deg},
              {"reverb", reverb_to_json(s.reverb)}};
}

json permissions_to_json(const PermissionEntry& p) {
  json locks = json::array();
  for (const auto& b : p.freq_locks) locks.push_back({b.low_hz, b.high_hz});
  return json{{"mutable", p.is_mutable},
              {"gain_min_db", p.gain_min_db},
              {"gain_max_db", p.gain_max_db},
              {"freq_locks", locks},
              {"preserve_dynamics", p.preserve_dynamics}};
}

json action_to_json(const RuleAction& a) {
  json j{{"stem", std::string(to_label(a.stem))}};
  switch (a.kind) {
    case RuleAction::Kind::Gain:
      j["kind"] = "gain";
      j["value_db"] = a.value_db;
      break;
    case RuleAction::Kind::Compress:
      j["kind"] = "compress";
      j["ratio"] = a.ratio;
      j["threshold_db"] = a.threshold_db;
      break;
    case RuleAction::Kind::Eq:
      j["kind"] = "eq";
      j["freq_hz"] = a.freq_hz;
      j["gain_db"] = a.value_db;
      j["q"] = a.q;
      break;
  }
  return j;
}

}  // namespace

std::string metadata_to_json(const SncMetadata& m, bool pretty) {
  json stems = json::array();
  for (const auto& s : m.stems) {
    stems.push_back(json{{"name", s.name},
                         {"track", s.track},
                         {"bitrate_kbps", s.bitrate_kbps},
                         {"spatial", spatial_to_json(s.spatial)},
                         {"permissions", permissions_to_json(s.permissions)}});
  }
  json rules = json::array();
  for (const auto& r : m.adaptive_rules) {
    json cond = json::object();
    if (r.condition.noise_level) {
      cond["noise_level"] = to_label(*r.condition.noise_level);
    }
    if (r.condition.speaker_type) {
      cond["speaker_type"] = to_label(*r.condition.speaker_type);
    }
    json actions = json::array();
    for (const auto& a : r.actions) actions.push_back(action_to_json(a));
    rules.push_back(json{{"condition", cond}, {"actions", actions}});
  }
  // nlohmann::json objects keep keys sorted, so dumps are deterministic.
  json doc{{"version", m.version},
           {"loudness_target_lufs", m.loudness_target_lufs},
           {"stems", stems},
           {"residual_track", m.residual_track},
           {"adaptive_rules", rules}};
  return pretty ? doc.dump(2) : doc.dump();
}

SncMetadata metadata_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("metadata is not valid JSON: ") +
                                       e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::Schema, "metadata root must be an object");
  }

  SncMetadata m;
  if (!doc.contains("version") || !doc["version"].is_number_integer()) {
    throw Error(ErrorCode::Schema, "metadata: integer 'version' is mandatory");
  }
  m.version = doc["version"].get<int>();
  if (doc.contains("loudness_target_lufs")) {
    m.loudness_target_lufs =
        require_number(doc["loudness_target_lufs"], "loudness_target_lufs");
  }
  if (doc.contains("residual_track")) {
    if (!doc["residual_track"].is_number_integer()) {
      throw Error(ErrorCode::Schema, "metadata: residual_track must be an integer");
    }
    m.residual_track = doc["residual_track"].get<int>();
  }

  if (!doc.contains("stems") || !doc["stems"].is_array()) {
    throw Error(ErrorCode::Schema, "metadata: 'stems' array is mandatory");
  }
  size_t si = 0;
  for (const auto& js : doc["stems"]) {
    const std::string base = "stems[" + std::to_string(si++) + "]";
    if (!js.is_object() || !js.contains("name") || !js["name"].is_string() ||
        !js.contains("track") || !js["track"].is_number_integer()) {
      throw Error(ErrorCode::Schema,
                  "metadata: " + base + " needs string 'name' and integer 'track'");
    }
    StemDescriptor d;
    d.name = js["name"].get<std::string>();
    d.track = js["track"].get<int>();
    if (js.contains("bitrate_kbps")) {
      d.bitrate_kbps =
          static_cast<int>(require_number(js["bitrate_kbps"], base + ".bitrate_kbps"));
    }
    if (js.contains("spatial")) {
      const auto& sp = js["spatial"];
      if (!sp.is_object()) {
        throw Error(ErrorCode::Schema, "metadata: " + base + ".spatial must be an object");
      }
      if (sp.contains("position")) {
        if (!sp["position"].is_array() || sp["position"].size() != 3) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".spatial.position must be [x, y, z]");
        }
        for (int a = 0; a < 3; ++a) {
          d.spatial.position[a] = require_number(
              sp["position"][a], base + ".spatial.position[" + std::to_string(a) + "]");
        }
      }
      if (sp.contains("spread_deg")) {
        d.spatial.spread_deg = require_number(sp["spread_deg"], base + ".spatial.spread_deg");
      }
      if (sp.contains("reverb")) {
        const auto& rv = sp["reverb"];
        if (!rv.is_object()) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".spatial.reverb must be an object");
        }
        if (rv.contains("type")) {
          if (!rv["type"].is_string()) {
            throw Error(ErrorCode::Schema,
                        "metadata: " + base + ".spatial.reverb.type must be a string");
          }
          d.spatial.reverb.type = rv["type"].get<std::string>();
        }
        if (rv.contains("decay_s")) {
          d.spatial.reverb.decay_s =
              require_number(rv["decay_s"], base + ".spatial.reverb.decay_s");
        }
        if (rv.contains("predelay_ms")) {
          d.spatial.reverb.predelay_ms =
              require_number(rv["predelay_ms"], base + ".spatial.reverb.predelay_ms");
        }
        if (rv.contains("wet")) {
          d.spatial.reverb.wet = require_number(rv["wet"], base + ".spatial.reverb.wet");
        }
      }
    }
    if (js.contains("permissions")) {
      const auto& pm = js["permissions"];
      if (!pm.is_object()) {
        throw Error(ErrorCode::Schema,
                    "metadata: " + base + ".permissions must be an object");
      }
      if (pm.contains("mutable")) {
        if (!pm["mutable"].is_boolean()) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".permissions.mutable must be a boolean");
        }
        d.permissions.is_mutable = pm["mutable"].get<bool>();
      }
      if (pm.contains("gain_min_db")) {
        d.permissions.gain_min_db =
            require_number(pm["gain_min_db"], base + ".permissions.gain_min_db");
      }
      if (pm.contains("gain_max_db")) {
        d.permissions.gain_max_db =
            require_number(pm["gain_max_db"], base + ".permissions.gain_max_db");
      }
      if (pm.contains("preserve_dynamics")) {
        if (!pm["preserve_dynamics"].is_boolean()) {
          throw Error(ErrorCode::Schema, "metadata: " + base +
                                             ".permissions.preserve_dynamics must be a boolean");
        }
        d.permissions.preserve_dynamics = pm["preserve_dynamics"].get<bool>();
      }
      if (pm.contains("freq_locks")) {
        if (!pm["freq_locks"].is_array()) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".permissions.freq_locks must be an array");
        }
        size_t bi = 0;
        for (const auto& jb : pm["freq_locks"]) {
          const std::string bbase =
              base + ".permissions.freq_locks[" + std::to_string(bi++) + "]";
          if (!jb.is_array() || jb.size() != 2) {
            throw Error(ErrorCode::Schema,
                        "metadata: " + bbase + " must be [low_hz, high_hz]");
          }
          FreqBand band;
          band.low_hz = require_number(jb[0], bbase + "[0]");
          band.high_hz = require_number(jb[1], bbase + "[1]");
          d.permissions.freq_locks.push_back(band);
        }
      }
    }
    m.stems.push_back(std::move(d));
  }

  if (doc.contains("adaptive_rules")) {
    if (!doc["adaptive_rules"].is_array()) {
      throw Error(ErrorCode::Schema, "metadata: adaptive_rules must be an array");
    }
    size_t ri = 0;
    for (const auto& jr : doc["adaptive_rules"]) {
      const std::string base = "adaptive_rules[" + std::to_string(ri++) + "]";
      if (!jr.is_object() || !jr.contains("condition") || !jr.contains("actions")) {
        throw Error(ErrorCode::Schema,
                    "metadata: " + base + " needs 'condition' and 'actions'");
      }
      AdaptiveRule rule;
      const auto& jc = jr["condition"];
      if (!jc.is_object()) {
        throw Error(ErrorCode::Schema, "metadata: " + base + ".condition must be an object");
      }
      if (jc.contains("noise_level")) {
        if (!jc["noise_level"].is_string()) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".condition.noise_level must be a string");
        }
        auto v = noise_level_from_label(jc["noise_level"].get<std::string>());
        if (!v) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".condition.noise_level must be low|medium|high");
        }
        rule.condition.noise_level = v;
      }
      if (jc.contains("speaker_type")) {
        if (!jc["speaker_type"].is_string()) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base + ".condition.speaker_type must be a string");
        }
        auto v = speaker_type_from_label(jc["speaker_type"].get<std::string>());
        if (!v) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + base +
                          ".condition.speaker_type must be studio|headphones|phone|laptop");
        }
        rule.condition.speaker_type = v;
      }
      if (!jr["actions"].is_array()) {
        throw Error(ErrorCode::Schema, "metadata: " + base + ".actions must be an array");
      }
      size_t ai = 0;
      for (const auto& ja : jr["actions"]) {
        const std::string abase = base + ".actions[" + std::to_string(ai++) + "]";
        if (!ja.is_object() || !ja.contains("stem") || !ja["stem"].is_string() ||
            !ja.contains("kind") || !ja["kind"].is_string()) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + abase + " needs string 'stem' and 'kind'");
        }
        RuleAction act;
        auto stem = stem_from_label(ja["stem"].get<std::string>());
        if (!stem) {
          throw Error(ErrorCode::Schema,
                      "metadata: " + abase + ".stem is not a stem label");
        }
        act.stem = *stem;
        const std::string kind = ja["kind"].get<std::string>();
        if (kind == "gain") {
          act.kind = RuleAction::Kind::Gain;
          act.value_db = require_number(ja.value("value_db", json(0.0)),
                                        abase + ".value_db");
        } else if (kind == "compress") {
          act.kind = RuleAction::Kind::Compress;
          act.ratio = require_number(ja.value("ratio", json(1.0)), abase + ".ratio");
          act.threshold_db = require_number(ja.value("threshold_db", json(0.0)),
                                            abase + ".threshold_db");
        } else if (kind == "eq") {
          act.kind = RuleAction::Kind::Eq;
          act.freq_hz = require_number(ja.value("freq_hz", json(0.0)), abase + ".freq_hz");
          act.value_db = require_number(ja.value("gain_db", json(0.0)), abase + ".gain_db");
          act.q = require_number(ja.value("q", json(1.0)), abase + ".q");
        } else {
          throw Error(ErrorCode::Schema,
                      "metadata: " + abase + ".kind must be gain|compress|eq");
        }
        rule.actions.push_back(act);
      }
      m.adaptive_rules.push_back(std::move(rule));
    }
  }
  return m;
}

}  // namespace snc
