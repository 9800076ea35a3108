#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snc/audio_buffer.hpp"
#include "snc/bench.hpp"
#include "snc/container.hpp"
#include "snc/errors.hpp"
#include "snc/fixture.hpp"
#include "snc/loudness.hpp"
#include "snc/metadata.hpp"
#include "snc/metrics.hpp"
#include "snc/pipeline.hpp"
#include "snc/renderer.hpp"
#include "snc/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snc;

namespace {

// ---------------------------------------------------------------------------
// small shared helpers

std::string fmt(const char* spec, double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char out[64];
  std::snprintf(out, sizeof(out), spec, value);
  return out;
}

json json_number(double value) {
  if (std::isinf(value)) return value > 0 ? json("inf") : json("-inf");
  return json(value);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path);
  return text;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
}

void write_binary_file(const std::string& path,
                       const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
}

StemKind parse_stem_label(const std::string& label) {
  if (auto kind = stem_from_label(label)) return *kind;
  throw Error(ErrorCode::Argument,
              "unknown stem '" + label +
                  "' (expected vocals, drums, bass, or other)");
}

// Parses "stem=value" assignments used by --gain and --bitrate.
std::pair<StemKind, double> parse_stem_assignment(const std::string& text,
                                                  const char* flag) {
  const size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw Error(ErrorCode::Argument, std::string(flag) + " expects stem=value, got '" + text + "'");
  }
  const StemKind kind = parse_stem_label(text.substr(0, eq));
  const std::string value = text.substr(eq + 1);
  size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) {
    throw Error(ErrorCode::Argument,
                std::string(flag) + ": '" + value + "' is not a number");
  }
  return {kind, parsed};
}

AudioBuffer trim_to(const AudioBuffer& buffer, size_t length) {
  std::vector<std::vector<double>> channels(buffer.channels());
  for (int c = 0; c < buffer.channels(); ++c) {
    const auto samples = buffer.channel(c);
    channels[c].assign(samples.begin(), samples.begin() + length);
  }
  return AudioBuffer(buffer.sample_rate(), std::move(channels));
}

WavFormat parse_wav_format(const std::string& name) {
  if (name == "pcm16") return WavFormat::Pcm16;
  if (name == "pcm24") return WavFormat::Pcm24;
  if (name == "float32") return WavFormat::Float32;
  throw Error(ErrorCode::Argument,
              "unknown format '" + name + "' (pcm16, pcm24, float32)");
}

// ---------------------------------------------------------------------------
// shared option groups

// Stem WAV inputs plus the optional original mix, as given on the command
// line. Loading is separate from parsing so missing files are reported
// before any work starts and before any output is written.
struct StemInputs {
  std::map<StemKind, std::string> paths;
  std::string mix_path;
};

void add_stem_options(CLI::App* cmd, StemInputs& inputs) {
  cmd->add_option("--vocals", inputs.paths[StemKind::Vocals], "vocals stem WAV");
  cmd->add_option("--drums", inputs.paths[StemKind::Drums], "drums stem WAV");
  cmd->add_option("--bass", inputs.paths[StemKind::Bass], "bass stem WAV");
  cmd->add_option("--other", inputs.paths[StemKind::Other], "other stem WAV");
  cmd->add_option("--mix", inputs.mix_path,
                  "original mix WAV (default: sum of the stems)");
}

StemSet load_stems(const StemInputs& inputs) {
  std::map<StemKind, AudioBuffer> stems;
  for (const auto& [kind, path] : inputs.paths) {
    if (path.empty()) continue;
    if (!fs::exists(path)) {
      throw Error(ErrorCode::Io, "stem file not found: " + path);
    }
    stems.emplace(kind, read_wav(path));
  }
  if (stems.empty()) {
    throw Error(ErrorCode::Argument,
                "at least one stem input is required (--vocals/--drums/--bass/--other)");
  }
  return StemSet(std::move(stems));
}

std::optional<AudioBuffer> load_mix(const StemInputs& inputs) {
  if (inputs.mix_path.empty()) return std::nullopt;
  if (!fs::exists(inputs.mix_path)) {
    throw Error(ErrorCode::Io, "mix file not found: " + inputs.mix_path);
  }
  return read_wav(inputs.mix_path);
}

// Encoder tuning shared by encode and bench.
struct EncodeTuning {
  std::vector<std::string> bitrates;  // stem=kbps
  int residual_bitrate_kbps = 64;
  double target_lufs = -16.0;
  std::string metadata_path;
};

void add_encode_tuning(CLI::App* cmd, EncodeTuning& tuning) {
  cmd->add_option("--bitrate", tuning.bitrates,
                  "per-stem bitrate override, stem=kbps (repeatable)");
  cmd->add_option("--residual-bitrate", tuning.residual_bitrate_kbps,
                  "residual bitrate in kbps")->capture_default_str();
  cmd->add_option("--target-lufs", tuning.target_lufs,
                  "integrated loudness target")->capture_default_str();
  cmd->add_option("--metadata", tuning.metadata_path,
                  "metadata JSON file (default: generated)");
}

// The returned options borrow `metadata`; keep it alive through the encode.
EncodeOptions build_encode_options(const EncodeTuning& tuning,
                                   std::optional<SncMetadata>& metadata) {
  EncodeOptions options;
  for (const std::string& text : tuning.bitrates) {
    const auto [kind, value] = parse_stem_assignment(text, "--bitrate");
    options.bitrate_overrides_kbps[kind] = int(value);
  }
  options.residual_bitrate_kbps = tuning.residual_bitrate_kbps;
  options.loudness_target_lufs = tuning.target_lufs;
  if (!tuning.metadata_path.empty()) {
    metadata = metadata_from_json(read_text_file(tuning.metadata_path));
    options.metadata = &*metadata;
  }
  return options;
}

json components_json(const ComponentSizes& components) {
  json tracks;
  for (const auto& [name, bytes] : components.tracks) tracks[name] = bytes;
  json out;
  out["tracks"] = tracks;
  out["metadata_bytes"] = components.attachment;
  out["container_overhead_bytes"] =
      components.file - components.components_total();
  out["file_bytes"] = components.file;
  return out;
}

json residual_json(const ResidualStats& stats) {
  return {{"rms_db", json_number(stats.rms_db)},
          {"peak_db", json_number(stats.peak_db)},
          {"energy_ratio", json_number(stats.energy_ratio)},
          {"snr_db", json_number(stats.snr_db)}};
}

// ---------------------------------------------------------------------------
// encode

struct EncodeArgs {
  StemInputs inputs;
  EncodeTuning tuning;
  std::string output;
  std::string report_path;
};

int run_encode(const EncodeArgs& args) {
  const char* stage = "reading inputs";
  try {
    const StemSet stems = load_stems(args.inputs);
    const std::optional<AudioBuffer> mix = load_mix(args.inputs);
    std::optional<SncMetadata> metadata;
    const EncodeOptions options = build_encode_options(args.tuning, metadata);

    stage = "encode pipeline";
    const EncodeSession session =
        encode_session(stems, mix ? &*mix : nullptr, options);
    const std::vector<uint8_t> bytes = session_to_bytes(session);

    if (session.residual_stats.peak_db > -1.0) {
      std::fprintf(stderr,
                   "warning: residual peak %.2f dBFS is above -1 dBFS\n",
                   session.residual_stats.peak_db);
    }

    stage = "writing output";
    write_binary_file(args.output, bytes);

    stage = "writing report";
    const ComponentSizes components = demux_bytes(bytes).component_sizes;
    json streams;
    for (const auto& [kind, stream] : session.stems) {
      streams[std::string(to_label(kind))] = {
          {"nominal_bitrate_kbps", stream.nominal_bitrate_kbps},
          {"measured_bitrate_kbps", json_number(stream.measured_bitrate_kbps())},
          {"payload_bytes", stream.payload_bytes()}};
    }
    streams["residual"] = {
        {"nominal_bitrate_kbps", session.residual.nominal_bitrate_kbps},
        {"measured_bitrate_kbps",
         json_number(session.residual.measured_bitrate_kbps())},
        {"payload_bytes", session.residual.payload_bytes()}};

    json report;
    report["output"] = args.output;
    report["duration_s"] = json_number(double(stems.length()) /
                                       double(stems.sample_rate()));
    report["loudness"] = {
        {"integrated_lufs", json_number(session.loudness.integrated_lufs)},
        {"gain_applied_db", json_number(session.loudness.gain_applied_db)}};
    report["residual"] = residual_json(session.residual_stats);
    report["streams"] = streams;
    report["components"] = components_json(components);

    const std::string text = report.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!args.report_path.empty()) write_text_file(args.report_path, text);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc encode: %s: %s\n", stage, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// decode

struct DecodeArgs {
  std::string input;
  std::string output;
  std::string stem;
  std::string format = "pcm24";
};

int run_decode(const DecodeArgs& args) {
  const char* stage = "reading input";
  try {
    const WavFormat format = parse_wav_format(args.format);
    const SncFile file = demux(args.input);

    stage = "decoding";
    AudioBuffer out;
    if (!args.stem.empty()) {
      const StemKind kind = parse_stem_label(args.stem);
      const auto it = file.streams.find(kind);
      if (it == file.streams.end()) {
        throw Error(ErrorCode::Argument,
                    "no '" + args.stem + "' track in " + args.input);
      }
      out = lossy_decode(it->second);
    } else {
      out = decode_file(file).reconstruction;
    }

    stage = "writing output";
    write_wav(args.output, out, format);
    std::fprintf(stderr, "wrote %s (%.2f s, %s)\n", args.output.c_str(),
                 double(out.length()) / out.sample_rate(),
                 args.format.c_str());
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc decode: %s: %s\n", stage, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// inspect

struct InspectArgs {
  std::string input;
  bool as_json = false;
};

json inspect_json(const SncFile& file, size_t file_bytes) {
  json tracks = json::array();
  const auto track_row = [&](const std::string& name, int track,
                             const char* role, const EncodedStream& stream) {
    json row;
    row["track"] = track;
    row["name"] = name;
    row["role"] = role;
    row["codec"] = stream.codec_id;
    row["sample_rate"] = stream.sample_rate;
    row["channels"] = stream.channels;
    // The residual's nominal rate is not stored in the container; only
    // stems carry one (in their metadata descriptors).
    row["nominal_bitrate_kbps"] = stream.nominal_bitrate_kbps > 0
                                      ? json(stream.nominal_bitrate_kbps)
                                      : json(nullptr);
    row["measured_bitrate_kbps"] = json_number(stream.measured_bitrate_kbps());
    row["payload_bytes"] = stream.payload_bytes();
    row["percent_of_file"] =
        json_number(100.0 * double(stream.payload_bytes()) / double(file_bytes));
    row["duration_s"] = json_number(double(stream.original_length) /
                                    stream.sample_rate);
    tracks.push_back(row);
  };

  int ordinal = 1;
  for (const auto& [kind, stream] : file.streams) {
    int track = ordinal;
    for (const auto& descriptor : file.metadata.stems) {
      if (descriptor.name == to_label(kind)) track = descriptor.track;
    }
    track_row(std::string(to_label(kind)), track, "stem", stream);
    ++ordinal;
  }
  track_row("residual",
            file.metadata.residual_track > 0 ? file.metadata.residual_track
                                             : ordinal,
            "residual", file.residual_stream);

  json violations = json::array();
  for (const auto& violation : file.violations) {
    violations.push_back({{"path", violation.path},
                          {"message", violation.message}});
  }

  json out;
  out["file_bytes"] = file_bytes;
  out["duration_s"] = json_number(file.duration_s);
  out["tracks"] = tracks;
  out["metadata"] = json::parse(file.metadata_json);
  out["components"] = components_json(file.component_sizes);
  out["violations"] = violations;
  return out;
}

void print_inspect_text(const std::string& path, const SncFile& file,
                        size_t file_bytes) {
  std::printf("%s: %zu tracks, %.2f s, %zu bytes\n", path.c_str(),
              file.streams.size() + 1, file.duration_s, file_bytes);
  std::printf("tracks:\n");
  const auto print_track = [&](int track, const std::string& name,
                               const EncodedStream& stream) {
    // Nominal rate is only stored for stems; the residual shows "--".
    char nominal[20];
    if (stream.nominal_bitrate_kbps > 0) {
      std::snprintf(nominal, sizeof(nominal), "%3d",
                    stream.nominal_bitrate_kbps);
    } else {
      std::snprintf(nominal, sizeof(nominal), " --");
    }
    std::printf(
        "  %d  %-8s  %s  %d Hz  %d ch  %s kbps nominal  %6.1f kbps measured  "
        "%zu bytes (%.1f%%)\n",
        track, name.c_str(), stream.codec_id.c_str(), stream.sample_rate,
        stream.channels, nominal, stream.measured_bitrate_kbps(),
        stream.payload_bytes(),
        100.0 * double(stream.payload_bytes()) / double(file_bytes));
  };
  int ordinal = 1;
  for (const auto& [kind, stream] : file.streams) {
    print_track(ordinal, std::string(to_label(kind)), stream);
    ++ordinal;
  }
  print_track(ordinal, "residual", file.residual_stream);

  const SncMetadata& metadata = file.metadata;
  std::printf(
      "metadata: version %d, loudness target %.1f LUFS, %zu bytes, %zu stems, "
      "%zu adaptive rules\n",
      metadata.version, metadata.loudness_target_lufs,
      file.component_sizes.attachment, metadata.stems.size(),
      metadata.adaptive_rules.size());
  for (const auto& descriptor : metadata.stems) {
    const PermissionEntry& p = descriptor.permissions;
    std::printf("  %-8s %s, gain [%+.1f, %+.1f] dB%s%s\n",
                descriptor.name.c_str(),
                p.is_mutable ? "mutable" : "immutable", p.gain_min_db,
                p.gain_max_db,
                p.preserve_dynamics ? ", preserves dynamics" : "",
                p.freq_locks.empty() ? "" : ", frequency locks");
  }
  std::printf("container overhead: %zu bytes (%.1f%%)\n",
              file.component_sizes.file -
                  file.component_sizes.components_total(),
              100.0 *
                  double(file.component_sizes.file -
                         file.component_sizes.components_total()) /
                  double(file_bytes));
  if (file.violations.empty()) {
    std::printf("metadata violations: none\n");
  } else {
    std::printf("metadata violations:\n");
    for (const auto& violation : file.violations) {
      std::printf("  %s: %s\n", violation.path.c_str(),
                  violation.message.c_str());
    }
  }
}

int run_inspect(const InspectArgs& args) {
  const char* stage = "reading input";
  try {
    const SncFile file = demux(args.input);
    const size_t file_bytes = fs::file_size(args.input);

    stage = "reporting";
    if (args.as_json) {
      const std::string text = inspect_json(file, file_bytes).dump(2) + "\n";
      std::fputs(text.c_str(), stdout);
    } else {
      print_inspect_text(args.input, file, file_bytes);
    }
    // Violations are printed above, never swallowed; they fail the command
    // so scripted checks notice invalid files.
    return file.violations.empty() ? 0 : 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc inspect: %s: %s\n", stage, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsArgs {
  std::string reference;
  std::string degraded;
  std::string output;
};

int run_metrics(const MetricsArgs& args) {
  const char* stage = "reading inputs";
  try {
    AudioBuffer reference = read_wav(args.reference);
    AudioBuffer degraded = read_wav(args.degraded);

    stage = "computing metrics";
    // Decoder and resampler paths can disagree by a few samples; tolerate up
    // to one analysis frame and trim to the shorter signal. Anything larger
    // is a real alignment problem, not edge slack.
    constexpr size_t kTrimLimit = 2048;
    if (reference.length() != degraded.length()) {
      const size_t longer = std::max(reference.length(), degraded.length());
      const size_t shorter = std::min(reference.length(), degraded.length());
      if (longer - shorter > kTrimLimit) {
        throw Error(ErrorCode::Alignment,
                    "length mismatch of " + std::to_string(longer - shorter) +
                        " samples exceeds the " + std::to_string(kTrimLimit) +
                        "-sample trim limit");
      }
      std::fprintf(stderr,
                   "warning: trimming %zu samples to align the inputs\n",
                   longer - shorter);
      reference = trim_to(reference, shorter);
      degraded = trim_to(degraded, shorter);
    }

    const double stoi_value = stoi(reference, degraded);
    const double sc_value = spectral_convergence(reference, degraded);
    const double snr_value = snr_db(reference, degraded);

    json report;
    report["stoi"] = {{"value", json_number(stoi_value)},
                      {"target", "> 0.95"},
                      {"pass", stoi_value > 0.95}};
    report["spectral_convergence"] = {{"value", json_number(sc_value)},
                                      {"target", "< 0.05"},
                                      {"pass", sc_value < 0.05}};
    report["snr_db"] = {{"value", json_number(snr_value)},
                        {"target", "> 20 dB"},
                        {"pass", snr_value > 20.0}};

    stage = "writing report";
    const std::string text = report.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!args.output.empty()) write_text_file(args.output, text);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc metrics: %s: %s\n", stage, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
  std::string input;
  std::string output;
  std::vector<std::string> gains;  // stem=db
  std::vector<std::string> mutes;  // stem
  std::string env_path;
  std::string plan_path;
  std::string format = "pcm24";
};

int run_render(const RenderArgs& args) {
  const char* stage = "reading input";
  try {
    const WavFormat format = parse_wav_format(args.format);
    const SncFile file = demux(args.input);

    stage = "resolving the mix plan";
    MixRequest request;
    for (const std::string& text : args.gains) {
      const auto [kind, value] = parse_stem_assignment(text, "--gain");
      request.gain_db[kind] = value;
    }
    for (const std::string& label : args.mutes) {
      request.mute.insert(parse_stem_label(label));
    }
    if (!args.env_path.empty()) {
      request.environment = environment_from_json(read_text_file(args.env_path));
    }
    const ResolvedMixPlan plan = resolve_plan(request, file.metadata);

    stage = "rendering";
    const DecodedFile decoded = decode_file(file);
    const AudioBuffer out = render(decoded.stems, &decoded.residual, plan);

    stage = "writing output";
    write_wav(args.output, out, format);
    const std::string plan_text = plan_to_json(plan);
    std::fputs(plan_text.c_str(), stdout);
    if (!args.plan_path.empty()) write_text_file(args.plan_path, plan_text);
    // Denials are part of the plan output, not failures: the render that
    // was permitted still happened.
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc render: %s: %s\n", stage, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  StemInputs inputs;
  EncodeTuning tuning;
  std::vector<std::string> baselines;  // label=path
  std::string lossless_label = "flac";
  std::string json_path;
  std::string markdown_path;
  std::string snc_path;
};

int run_bench_cmd(const BenchArgs& args) {
  const char* stage = "reading inputs";
  try {
    const StemSet stems = load_stems(args.inputs);
    const std::optional<AudioBuffer> mix = load_mix(args.inputs);
    std::optional<SncMetadata> metadata;

    BenchOptions options;
    options.encode = build_encode_options(args.tuning, metadata);
    options.lossless_label = args.lossless_label;
    for (const std::string& text : args.baselines) {
      const size_t eq = text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw Error(ErrorCode::Argument,
                    "--baseline expects label=path, got '" + text + "'");
      }
      const std::string label = text.substr(0, eq);
      const std::string path = text.substr(eq + 1);
      if (!fs::exists(path)) {
        throw Error(ErrorCode::Io, "baseline file not found: " + path);
      }
      options.baselines.push_back({label, size_t(fs::file_size(path))});
    }

    stage = "bench pipeline";
    const BenchRun run = run_bench(stems, mix ? &*mix : nullptr, options);

    stage = "writing reports";
    std::fputs(run.report.to_markdown().c_str(), stdout);
    if (!args.json_path.empty()) {
      write_text_file(args.json_path, run.report.to_json());
    }
    if (!args.markdown_path.empty()) {
      write_text_file(args.markdown_path, run.report.to_markdown());
    }
    if (!args.snc_path.empty()) {
      write_binary_file(args.snc_path, run.snc_bytes);
    }
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc bench: %s: %s\n", stage, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------------------
// fixture

struct FixtureArgs {
  double seconds = 30.0;
  std::string out_dir = ".";
};

int run_fixture(const FixtureArgs& args) {
  const char* stage = "synthesizing";
  try {
    const StemSet stems = make_fixture_stems(args.seconds);

    stage = "writing output";
    fs::create_directories(args.out_dir);
    for (const auto& [kind, buffer] : stems.entries()) {
      const fs::path path =
          fs::path(args.out_dir) / (std::string(to_label(kind)) + ".wav");
      write_wav(path, buffer, WavFormat::Float32);
      std::printf("%s\n", path.string().c_str());
    }
    const fs::path mix_path = fs::path(args.out_dir) / "mix.wav";
    write_wav(mix_path, mix_sum(stems), WavFormat::Float32);
    std::printf("%s\n", mix_path.string().c_str());
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "snc fixture: %s: %s\n", stage, e.what());
    return 2;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"Stem-native codec: encode, decode, inspect, measure, render, bench"};
  app.require_subcommand(1);

  EncodeArgs encode_args;
  CLI::App* encode_cmd =
      app.add_subcommand("encode", "encode stems (+ optional mix) to .snc");
  add_stem_options(encode_cmd, encode_args.inputs);
  add_encode_tuning(encode_cmd, encode_args.tuning);
  encode_cmd->add_option("-o,--output", encode_args.output, ".snc output path")
      ->required();
  encode_cmd->add_option("--report", encode_args.report_path,
                         "also write the JSON encode report here");

  DecodeArgs decode_args;
  CLI::App* decode_cmd =
      app.add_subcommand("decode", "decode a .snc file to WAV");
  decode_cmd->add_option("input", decode_args.input, ".snc file")->required();
  decode_cmd->add_option("-o,--output", decode_args.output, "WAV output path")
      ->required();
  decode_cmd->add_option("--stem", decode_args.stem,
                         "write this decoded stem instead of the mix");
  decode_cmd->add_option("--format", decode_args.format,
                         "pcm16, pcm24, or float32")->capture_default_str();

  InspectArgs inspect_args;
  CLI::App* inspect_cmd =
      app.add_subcommand("inspect", "show tracks, metadata, and sizes");
  inspect_cmd->add_option("input", inspect_args.input, ".snc file")->required();
  inspect_cmd->add_flag("--json", inspect_args.as_json,
                        "emit the JSON dump instead of text");

  MetricsArgs metrics_args;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "objective quality of degraded vs. reference");
  metrics_cmd
      ->add_option("--reference", metrics_args.reference, "reference WAV")
      ->required();
  metrics_cmd->add_option("--degraded", metrics_args.degraded, "degraded WAV")
      ->required();
  metrics_cmd->add_option("-o,--output", metrics_args.output,
                          "also write the JSON report here");

  RenderArgs render_args;
  CLI::App* render_cmd =
      app.add_subcommand("render", "adaptive remix under the file's permissions");
  render_cmd->add_option("input", render_args.input, ".snc file")->required();
  render_cmd->add_option("-o,--output", render_args.output, "WAV output path")
      ->required();
  render_cmd->add_option("--gain", render_args.gains,
                         "per-stem gain request, stem=dB (repeatable)");
  render_cmd->add_option("--mute", render_args.mutes,
                         "mute this stem (repeatable)");
  render_cmd->add_option("--env", render_args.env_path,
                         "environment profile JSON");
  render_cmd->add_option("--plan", render_args.plan_path,
                         "also write the resolved plan JSON here");
  render_cmd->add_option("--format", render_args.format,
                         "pcm16, pcm24, or float32")->capture_default_str();

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "encode + decode + measure, with report tables");
  add_stem_options(bench_cmd, bench_args.inputs);
  add_encode_tuning(bench_cmd, bench_args.tuning);
  bench_cmd->add_option("--baseline", bench_args.baselines,
                        "reference encoding to size against, label=path "
                        "(repeatable)");
  bench_cmd->add_option("--lossless", bench_args.lossless_label,
                        "baseline label anchoring the size hypothesis")->capture_default_str();
  bench_cmd->add_option("--json", bench_args.json_path,
                        "write the JSON report here");
  bench_cmd->add_option("--markdown", bench_args.markdown_path,
                        "write the markdown report here");
  bench_cmd->add_option("-o,--output", bench_args.snc_path,
                        "keep the encoded .snc here");

  FixtureArgs fixture_args;
  CLI::App* fixture_cmd = app.add_subcommand(
      "fixture", "write the deterministic synthetic stems as WAV files");
  fixture_cmd->add_option("--seconds", fixture_args.seconds,
                          "fixture duration")->capture_default_str();
  fixture_cmd->add_option("--out-dir", fixture_args.out_dir,
                          "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (encode_cmd->parsed()) return run_encode(encode_args);
  if (decode_cmd->parsed()) return run_decode(decode_args);
  if (inspect_cmd->parsed()) return run_inspect(inspect_args);
  if (metrics_cmd->parsed()) return run_metrics(metrics_args);
  if (render_cmd->parsed()) return run_render(render_args);
  if (bench_cmd->parsed()) return run_bench_cmd(bench_args);
  if (fixture_cmd->parsed()) return run_fixture(fixture_args);
  return 1;
}
