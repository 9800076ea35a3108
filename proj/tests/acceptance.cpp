// Acceptance gate: the eleven release criteria, one pass/fail line each.
//
//   snc_acceptance                runs every criterion
//   snc_acceptance --criterion N  runs one (ctest gives each its own timeout)
//
// Exit status is 0 iff every criterion that ran passed. Tolerances are
// pinned here as constants; a criterion that cannot be met is allowed to
// fail visibly — nothing in this file may loosen a bound to make a run
// green.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <vector>

extern "C" {
#include <libavformat/avformat.h>
#include <libavutil/log.h>
}

#include "snc/audio_buffer.hpp"
#include "snc/bench.hpp"
#include "snc/codec.hpp"
#include "snc/container.hpp"
#include "snc/errors.hpp"
#include "snc/fixture.hpp"
#include "snc/loudness.hpp"
#include "snc/metadata.hpp"
#include "snc/metrics.hpp"
#include "snc/pipeline.hpp"
#include "snc/renderer.hpp"
#include "snc/residual.hpp"
#include "support/test_signals.hpp"

using namespace snc;

namespace {

// ---------------------------------------------------------------------------
// pinned tolerances, one block per criterion

constexpr double kC1MaxIdentityError = 0.0;  // exact

constexpr double kC2MinSnrDb = 20.0;
constexpr double kC2MinStoi = 0.95;
constexpr double kC2MaxSpectralConvergence = 0.08;

constexpr double kC3MaxResidualPayloadShare = 0.25;
constexpr double kC3MinResidualSnrDb = 15.0;  // residual RMS >= 15 dB below mix

constexpr int kC4Buffers = 20;
constexpr int kC4MaxLagSearch = 960;  // one codec frame each way

constexpr double kC5StoiIdentityTol = 1e-6;
constexpr double kC5ScHalfTol = 1e-9;
constexpr double kC5SnrTol = 1e-6;
constexpr double kC5SineRmsTol = 0.01;
constexpr double kC5SineRmsExpected = -3.0103;

constexpr double kC6LoudnessTolLu = 0.5;

constexpr int kC8Iterations = 1000;

constexpr double kC9OracleTol = 1e-9;
constexpr double kC9CompressorTolDb = 0.2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, ...) {
  char out[512];
  va_list args;
  va_start(args, spec);
  std::vsnprintf(out, sizeof(out), spec, args);
  va_end(args);
  return out;
}

double max_abs_difference(const AudioBuffer& a, const AudioBuffer& b) {
  double worst = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    for (size_t i = 0; i < a.length(); ++i) {
      worst = std::max(worst, std::abs(a.channel(c)[i] - b.channel(c)[i]));
    }
  }
  return worst;
}

bool buffers_identical(const AudioBuffer& a, const AudioBuffer& b) {
  if (a.sample_rate() != b.sample_rate() || a.channels() != b.channels() ||
      a.length() != b.length()) {
    return false;
  }
  for (int c = 0; c < a.channels(); ++c) {
    for (size_t i = 0; i < a.length(); ++i) {
      if (a.channel(c)[i] != b.channel(c)[i]) return false;
    }
  }
  return true;
}

// The 30 s fixture and its encode session, shared by criteria 1-3 and 10-11
// when several run in one process. Everything here is deterministic, so
// caching cannot change any outcome.
const StemSet& fixture30() {
  static const StemSet stems = make_fixture_stems(30.0);
  return stems;
}

const EncodeSession& fixture_session() {
  static const EncodeSession session = encode_session(fixture30(), nullptr);
  return session;
}

// ---------------------------------------------------------------------------
// 1. residual identity, exact

Outcome criterion_1() {
  const StemSet& stems = fixture30();

  // The measurement is made from the library pieces directly rather than
  // through encode_session's internal gate, so this line reports the
  // property itself.
  auto [normalized, loudness] = normalize_lufs(mix_sum(stems), -16.0);
  const AudioBuffer mix = quantize_grid(normalized);
  const double gain = db_to_linear(loudness.gain_applied_db);

  const BitrateHierarchy ladder = BitrateHierarchy::defaults();
  std::map<StemKind, std::future<AudioBuffer>> tasks;
  for (const auto& [kind, buffer] : stems.entries()) {
    tasks.emplace(kind, std::async(std::launch::async, [&, kind] {
                    const AudioBuffer scaled = apply_gain(stems.at(kind), gain);
                    return lossy_decode(
                        lossy_encode(scaled, ladder.stem_profile(kind)));
                  }));
  }
  std::map<StemKind, AudioBuffer> decoded;
  for (auto& [kind, task] : tasks) decoded.emplace(kind, task.get());

  const AudioBuffer procedural = procedural_mix(StemSet(std::move(decoded)));
  const AudioBuffer residual = compute_residual(mix, procedural);

  double worst = 0.0;
  for (int c = 0; c < mix.channels(); ++c) {
    for (size_t i = 0; i < mix.length(); ++i) {
      const double rebuilt = procedural.channel(c)[i] + residual.channel(c)[i];
      worst = std::max(worst, std::abs(mix.channel(c)[i] - rebuilt));
    }
  }
  return {worst <= kC1MaxIdentityError,
          fmt("max |M - (P + R)| = %g over %zu samples x %d channels "
              "(tolerance %g)",
              worst, mix.length(), mix.channels(), kC1MaxIdentityError)};
}

// ---------------------------------------------------------------------------
// 2. round-trip quality

Outcome criterion_2() {
  const EncodeSession& session = fixture_session();
  const SncFile file = demux_bytes(session_to_bytes(session));
  const DecodedFile decoded = decode_file(file);

  const double snr = snr_db(session.normalized_mix, decoded.reconstruction);
  const double st = stoi(session.normalized_mix, decoded.reconstruction);
  const double sc =
      spectral_convergence(session.normalized_mix, decoded.reconstruction);

  const bool pass = snr > kC2MinSnrDb && st > kC2MinStoi &&
                    sc < kC2MaxSpectralConvergence;
  return {pass, fmt("snr %.2f dB (> %.0f), stoi %.4f (> %.2f), sc %.4f (< %.2f)",
                    snr, kC2MinSnrDb, st, kC2MinStoi, sc,
                    kC2MaxSpectralConvergence)};
}

// ---------------------------------------------------------------------------
// 3. residual economy

Outcome criterion_3() {
  const EncodeSession& session = fixture_session();

  size_t payload = session.residual.payload_bytes();
  for (const auto& [kind, stream] : session.stems) {
    payload += stream.payload_bytes();
  }
  const double share = double(session.residual.payload_bytes()) / payload;
  const double snr = session.residual_stats.snr_db;

  const bool pass =
      share < kC3MaxResidualPayloadShare && snr >= kC3MinResidualSnrDb;
  return {pass,
          fmt("residual %zu of %zu payload bytes = %.1f%% (< %.0f%%); "
              "residual sits %.2f dB below the mix (>= %.0f)",
              session.residual.payload_bytes(), payload, share * 100.0,
              kC3MaxResidualPayloadShare * 100.0, snr, kC3MinResidualSnrDb)};
}

// ---------------------------------------------------------------------------
// 4. alignment property

Outcome criterion_4() {
  test::Rng rng(0xA11A);
  const int rate = 48000;

  for (int i = 0; i < kC4Buffers; ++i) {
    const size_t length = rate + rng.next_u64() % (4 * rate + 1);  // 1-5 s
    const int channels = (rng.next_u64() & 1) ? 2 : 1;
    AudioBuffer original;
    switch (rng.next_u64() % 3) {
      case 0:
        original = test::make_music_like(rate, channels, length,
                                         0xB000 + uint64_t(i));
        break;
      case 1:
        original = test::make_noise(rate, channels, length, 0.3,
                                    0xB100 + uint64_t(i));
        break;
      default:
        original = test::make_speech_like(rate, channels, length,
                                          0xB200 + uint64_t(i));
        break;
    }

    const AudioBuffer decoded = roundtrip(original, EncodeProfile{});
    if (decoded.length() != original.length()) {
      return {false, fmt("buffer %d: length %zu came back as %zu", i, length,
                         decoded.length())};
    }

    // Cross-correlation over a mid-signal segment; the peak must sit at
    // exactly lag zero or the decoder shifted the timeline.
    const AudioBuffer a = downmix_mono(original);
    const AudioBuffer b = downmix_mono(decoded);
    const size_t segment = std::min<size_t>(24000, length / 2);
    const size_t start = (length - segment) / 2;
    const int max_lag =
        std::min<int>(kC4MaxLagSearch, int(start));
    int best_lag = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
      double acc = 0.0;
      for (size_t n = 0; n < segment; ++n) {
        acc += a.channel(0)[start + n] * b.channel(0)[start + n + lag];
      }
      if (acc > best) {
        best = acc;
        best_lag = lag;
      }
    }
    if (best_lag != 0) {
      return {false, fmt("buffer %d: cross-correlation peak at lag %d", i,
                         best_lag)};
    }
  }
  return {true, fmt("%d random buffers (1-5 s): lengths exact, "
                    "cross-correlation peaks all at lag 0",
                    kC4Buffers)};
}

// ---------------------------------------------------------------------------
// 5. metric self-identity suite

Outcome criterion_5() {
  const int rate = 48000;
  std::vector<std::string> failures;

  const AudioBuffer speech = test::make_speech_like(rate, 1, 6 * rate, 0x51);
  const double stoi_identity = stoi(speech, speech);
  if (std::abs(stoi_identity - 1.0) > kC5StoiIdentityTol) {
    failures.push_back(fmt("stoi(x,x) = %.9f", stoi_identity));
  }

  const AudioBuffer music = test::make_music_like(rate, 2, 2 * rate, 0x52);
  const double sc_identity = spectral_convergence(music, music);
  if (sc_identity != 0.0) {
    failures.push_back(fmt("sc(x,x) = %g", sc_identity));
  }

  const double sc_half = spectral_convergence(music, apply_gain(music, 0.5));
  if (std::abs(sc_half - 0.5) > kC5ScHalfTol) {
    failures.push_back(fmt("sc(x,0.5x) = %.12f", sc_half));
  }

  // Noise scaled so its energy is exactly 1/100th of the signal's.
  const AudioBuffer x = test::make_music_like(rate, 1, 2 * rate, 0x53);
  const AudioBuffer n = test::make_noise(rate, 1, 2 * rate, 1.0, 0x54);
  double ex = 0.0, en = 0.0;
  for (size_t i = 0; i < x.length(); ++i) {
    ex += x.channel(0)[i] * x.channel(0)[i];
    en += n.channel(0)[i] * n.channel(0)[i];
  }
  const AudioBuffer degraded = add(x, apply_gain(n, std::sqrt(ex / (100.0 * en))));
  const double snr = snr_db(x, degraded);
  if (std::abs(snr - 20.0) > kC5SnrTol) {
    failures.push_back(fmt("snr at 1%% noise energy = %.9f dB", snr));
  }

  const double sine_rms = rms_dbfs(test::make_sine(rate, 1, rate, 997.0, 1.0));
  if (std::abs(sine_rms - kC5SineRmsExpected) > kC5SineRmsTol) {
    failures.push_back(fmt("unit sine rms = %.5f dBFS", sine_rms));
  }

  if (!failures.empty()) {
    std::string joined;
    for (const auto& f : failures) {
      if (!joined.empty()) joined += "; ";
      joined += f;
    }
    return {false, joined};
  }
  return {true, fmt("stoi(x,x) = 1 (+/- %g), sc(x,x) = 0, sc(x,0.5x) = 0.5 "
                    "(+/- %g), snr = 20 dB (+/- %g), unit sine rms = %.4f "
                    "(+/- %.2f)",
                    kC5StoiIdentityTol, kC5ScHalfTol, kC5SnrTol, sine_rms,
                    kC5SineRmsTol)};
}

// ---------------------------------------------------------------------------
// 6. loudness normalization and ceiling idempotence

Outcome criterion_6() {
  const AudioBuffer mix = mix_sum(fixture30());

  const auto [normalized, result] = normalize_lufs(mix, -16.0);
  const double measured = measure_integrated_lufs(normalized);
  const bool loudness_ok = std::abs(measured - (-16.0)) <= kC6LoudnessTolLu;

  const AudioBuffer once = apply_peak_ceiling(mix, -0.1);
  const AudioBuffer twice = apply_peak_ceiling(once, -0.1);
  const bool ceiling_ok = buffers_identical(once, twice);

  return {loudness_ok && ceiling_ok,
          fmt("normalized mix re-measures %.3f LUFS (-16 +/- %.1f); "
              "second ceiling pass bit-identical: %s",
              measured, kC6LoudnessTolLu, ceiling_ok ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 7. container round-trip + third-party reader

bool streams_equal(const EncodedStream& a, const EncodedStream& b,
                   std::string& why) {
  if (a.sample_rate != b.sample_rate || a.channels != b.channels ||
      a.preskip_samples != b.preskip_samples ||
      a.original_length != b.original_length) {
    why = "stream head fields differ";
    return false;
  }
  if (a.packets.size() != b.packets.size()) {
    why = fmt("packet count %zu vs %zu", a.packets.size(), b.packets.size());
    return false;
  }
  for (size_t i = 0; i < a.packets.size(); ++i) {
    if (a.packets[i].bytes != b.packets[i].bytes) {
      why = fmt("packet %zu bytes differ", i);
      return false;
    }
  }
  return true;
}

Outcome criterion_7() {
  // A short fixture keeps this criterion inside its budget; the property
  // is structural, not content-dependent.
  const StemSet stems = make_fixture_stems(5.0);
  const EncodeSession session = encode_session(stems, nullptr);
  const std::vector<uint8_t> bytes = session_to_bytes(session);

  const SncFile file = demux_bytes(bytes);
  std::string why;
  for (const auto& [kind, stream] : session.stems) {
    const auto it = file.streams.find(kind);
    if (it == file.streams.end()) {
      return {false, fmt("stem '%s' lost in the round trip",
                         std::string(to_label(kind)).c_str())};
    }
    if (!streams_equal(stream, it->second, why)) {
      return {false, fmt("stem '%s': %s", std::string(to_label(kind)).c_str(),
                         why.c_str())};
    }
  }
  if (!streams_equal(session.residual, file.residual_stream, why)) {
    return {false, "residual: " + why};
  }
  if (file.metadata_json != metadata_to_json(session.metadata)) {
    return {false, "metadata attachment bytes differ from the source"};
  }

  // Third-party smoke: libavformat must see a Matroska file with five Opus
  // audio tracks and be able to read packets from it.
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() /
      fmt("snc_acceptance_%d.snc", int(getpid()));
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
  }

  av_log_set_level(AV_LOG_FATAL);  // the attachment pseudo-stream warns
  AVFormatContext* ctx = nullptr;
  Outcome outcome{false, ""};
  do {
    if (avformat_open_input(&ctx, path.c_str(), nullptr, nullptr) != 0) {
      outcome.detail = "libavformat failed to open the file";
      break;
    }
    if (avformat_find_stream_info(ctx, nullptr) < 0) {
      outcome.detail = "libavformat failed to read stream info";
      break;
    }
    // libavformat models the Matroska attachment as one extra stream of
    // type attachment; the five audio tracks must all be 48 kHz opus.
    int audio = 0;
    int attachments = 0;
    bool all_opus = true;
    for (unsigned i = 0; i < ctx->nb_streams; ++i) {
      const AVCodecParameters* par = ctx->streams[i]->codecpar;
      if (par->codec_type == AVMEDIA_TYPE_AUDIO) {
        ++audio;
        if (par->codec_id != AV_CODEC_ID_OPUS || par->sample_rate != 48000) {
          all_opus = false;
        }
      } else if (par->codec_type == AVMEDIA_TYPE_ATTACHMENT) {
        ++attachments;
      }
    }
    if (audio != 5) {
      outcome.detail = fmt("libavformat sees %d audio tracks, expected 5",
                           audio);
      break;
    }
    if (!all_opus) {
      outcome.detail = "libavformat track parameters are not 48 kHz opus";
      break;
    }
    AVPacket packet;
    int packets_read = 0;
    while (packets_read < 50 && av_read_frame(ctx, &packet) >= 0) {
      ++packets_read;
      av_packet_unref(&packet);
    }
    if (packets_read < 50) {
      outcome.detail = fmt("libavformat read only %d packets", packets_read);
      break;
    }
    outcome.pass = true;
    outcome.detail =
        fmt("mux->demux byte-exact (packets, heads, metadata); libavformat "
            "parses 5/5 opus tracks (+%d attachment) and read %d packets",
            attachments, packets_read);
  } while (false);

  if (ctx) avformat_close_input(&ctx);
  std::filesystem::remove(path);
  return outcome;
}

// ---------------------------------------------------------------------------
// 8. permission safety, randomized

Outcome criterion_8() {
  test::Rng rng(0x5AFE);
  const auto pick_db = [&](double lo, double hi) {
    return lo + (hi - lo) * 0.5 * (rng.next_sample() + 1.0);
  };
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  for (int iteration = 0; iteration < kC8Iterations; ++iteration) {
    SncMetadata metadata = default_metadata(
        {StemKind::Vocals, StemKind::Drums, StemKind::Bass, StemKind::Other},
        {{StemKind::Vocals, 128},
         {StemKind::Drums, 96},
         {StemKind::Bass, 96},
         {StemKind::Other, 96}});
    for (auto& descriptor : metadata.stems) {
      descriptor.permissions.gain_min_db = pick_db(-24.0, 0.0);
      descriptor.permissions.gain_max_db = pick_db(0.0, 24.0);
      descriptor.permissions.is_mutable = (rng.next_u64() & 1) != 0;
      descriptor.permissions.preserve_dynamics = (rng.next_u64() & 1) != 0;
    }
    if (rng.next_u64() % 3 == 0) {
      AdaptiveRule rule;
      rule.condition.speaker_type = SpeakerType::Phone;
      RuleAction action;
      action.stem = kAllStemKinds[rng.next_u64() % 4];
      if (rng.next_u64() & 1) {
        action.kind = RuleAction::Kind::Gain;
        action.value_db = pick_db(-30.0, 30.0);
      } else {
        action.kind = RuleAction::Kind::Compress;
        action.ratio = 1.0 + double(rng.next_u64() % 8);
        action.threshold_db = pick_db(-40.0, -5.0);
      }
      rule.actions = {action};
      metadata.adaptive_rules.push_back(rule);
    }
    if (!validate_metadata(metadata).empty()) {
      return {false, fmt("iteration %d generated invalid metadata", iteration)};
    }

    MixRequest request;
    for (StemKind kind : kAllStemKinds) {
      const uint64_t roll = rng.next_u64() % 4;
      if (roll == 0) continue;
      if (roll == 1) {
        request.mute.insert(kind);
      } else {
        request.gain_db[kind] = pick_db(-40.0, 40.0);
      }
    }
    switch (rng.next_u64() % 3) {
      case 0: break;
      case 1: request.environment.noise_level = NoiseLevel::High; break;
      default:
        request.environment.noise_level = NoiseLevel::Medium;
        request.environment.speaker_type = SpeakerType::Phone;
        break;
    }

    const ResolvedMixPlan plan = resolve_plan(request, metadata);
    for (const auto& descriptor : metadata.stems) {
      const StemKind kind = *stem_from_label(descriptor.name);
      const StemPlan& stem = plan.stems.at(kind);
      const PermissionEntry& p = descriptor.permissions;
      if (!p.is_mutable) {
        if (stem.gain_db != 0.0) {
          return {false, fmt("iteration %d: immutable '%s' at %g dB",
                             iteration, descriptor.name.c_str(), stem.gain_db)};
        }
      } else if (request.mute.count(kind)) {
        if (stem.gain_db != kNegInf) {
          return {false, fmt("iteration %d: muted '%s' at %g dB", iteration,
                             descriptor.name.c_str(), stem.gain_db)};
        }
      } else if (stem.gain_db < p.gain_min_db || stem.gain_db > p.gain_max_db) {
        return {false,
                fmt("iteration %d: '%s' at %g dB outside [%g, %g]", iteration,
                    descriptor.name.c_str(), stem.gain_db, p.gain_min_db,
                    p.gain_max_db)};
      }
      if (p.preserve_dynamics && stem.compressor.has_value()) {
        return {false, fmt("iteration %d: compressor on dynamics-preserving "
                           "'%s'",
                           iteration, descriptor.name.c_str())};
      }
    }
  }
  return {true, fmt("%d randomized requests: every effective gain in bounds, "
                    "immutable stems at 0 dB, mutes exact, dynamics respected",
                    kC8Iterations)};
}

// ---------------------------------------------------------------------------
// 9. renderer oracle equivalence

Outcome criterion_9() {
  const int rate = 48000;
  const StemSet stems = StemSet(
      {{StemKind::Vocals, test::make_speech_like(rate, 2, size_t(rate), 0xA1)},
       {StemKind::Drums, test::make_noise(rate, 2, size_t(rate), 0.08, 0xA2)},
       {StemKind::Bass, test::make_sine(rate, 2, size_t(rate), 55.0, 0.1)},
       {StemKind::Other, test::make_music_like(rate, 2, size_t(rate), 0xA4)}});
  const SncMetadata metadata = default_metadata(
      {StemKind::Vocals, StemKind::Drums, StemKind::Bass, StemKind::Other},
      {{StemKind::Vocals, 128},
       {StemKind::Drums, 96},
       {StemKind::Bass, 96},
       {StemKind::Other, 96}});

  // Karaoke: mute vocals, compare against the brute-force sum of the rest.
  MixRequest karaoke;
  karaoke.mute.insert(StemKind::Vocals);
  const AudioBuffer karaoke_rendered =
      render(stems, nullptr, resolve_plan(karaoke, metadata));
  AudioBuffer karaoke_oracle = apply_peak_ceiling(
      add(add(stems.at(StemKind::Drums), stems.at(StemKind::Bass)),
          stems.at(StemKind::Other)),
      -0.1);
  const double karaoke_err = max_abs_difference(karaoke_rendered, karaoke_oracle);

  // Single-stem gain: +6 dB on bass against the scaled-sum oracle.
  MixRequest boost;
  boost.gain_db[StemKind::Bass] = 6.0;
  const AudioBuffer boost_rendered =
      render(stems, nullptr, resolve_plan(boost, metadata));
  AudioBuffer boost_oracle = apply_peak_ceiling(
      add(add(add(stems.at(StemKind::Vocals), stems.at(StemKind::Drums)),
              apply_gain(stems.at(StemKind::Bass), db_to_linear(6.0))),
          stems.at(StemKind::Other)),
      -0.1);
  const double boost_err = max_abs_difference(boost_rendered, boost_oracle);

  // Compressor static curve: a -10 dBFS constant through 3:1 at -20 dBFS
  // must settle at -16.67 dBFS.
  AudioBuffer constant(rate, 1, size_t(rate));
  const double level = db_to_linear(-10.0);
  for (size_t i = 0; i < constant.length(); ++i) {
    constant.channel(0)[i] = level;
  }
  const AudioBuffer compressed = apply_compressor(constant, 3.0, -20.0);
  const double out_db = linear_to_db(std::abs(compressed.channel(0)[rate / 2]));
  const double expected_db = -10.0 - (10.0 - 10.0 / 3.0);
  const double comp_err = std::abs(out_db - expected_db);

  const bool pass = karaoke_err <= kC9OracleTol && boost_err <= kC9OracleTol &&
                    comp_err <= kC9CompressorTolDb;
  return {pass, fmt("karaoke max err %.3g, +6 dB bass max err %.3g "
                    "(<= %g); compressor static curve off by %.3f dB "
                    "(<= %.1f)",
                    karaoke_err, boost_err, kC9OracleTol, comp_err,
                    kC9CompressorTolDb)};
}

// ---------------------------------------------------------------------------
// 10. determinism of full bench runs

Outcome criterion_10() {
  BenchOptions options;
  options.baselines = {{"flac", 9'000'000}};
  options.lossless_label = "flac";

  const BenchRun first = run_bench(fixture30(), nullptr, options);
  const BenchRun second = run_bench(fixture30(), nullptr, options);

  const bool snc_same = first.snc_bytes == second.snc_bytes;
  const bool json_same = first.report.to_json() == second.report.to_json();
  const bool md_same = first.report.to_markdown() == second.report.to_markdown();

  return {snc_same && json_same && md_same,
          fmt("two bench runs: .snc bytes identical: %s (%zu bytes), JSON "
              "identical: %s, markdown identical: %s",
              snc_same ? "yes" : "no", first.snc_bytes.size(),
              json_same ? "yes" : "no", md_same ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 11. entropy report

Outcome criterion_11() {
  const StemSet& stems = fixture30();
  const EntropyReport report = entropy_comparison(stems, mix_sum(stems));

  // Five values: one mean entropy per stem plus the mix. The inequality
  // verdict is reported below, never asserted.
  std::string values;
  int finite_count = 0;
  for (const auto& [kind, bits] : report.stem_entropy_bits) {
    if (std::isfinite(bits)) ++finite_count;
    values += fmt("%s %.3f, ", std::string(to_label(kind)).c_str(), bits);
  }
  if (std::isfinite(report.mix_entropy_bits)) ++finite_count;

  const bool pass = finite_count == 5 &&
                    std::isfinite(report.weighted_stem_sum_bits);
  return {pass,
          fmt("%smix %.3f bits; weighted stem sum %.3f; inequality "
              "(weighted sum < mix) holds: %s [reported, not asserted]",
              values.c_str(), report.mix_entropy_bits,
              report.weighted_stem_sum_bits,
              report.inequality_holds ? "yes" : "no")};
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > 11) {
    std::fprintf(stderr, "criterion must be 1..11\n");
    return 2;
  }

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion_1},  {2, criterion_2},  {3, criterion_3},
      {4, criterion_4},  {5, criterion_5},  {6, criterion_6},
      {7, criterion_7},  {8, criterion_8},  {9, criterion_9},
      {10, criterion_10}, {11, criterion_11},
  };

  bool all_pass = true;
  for (const auto& [number, run] : criteria) {
    if (only != 0 && number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const Error& e) {
      outcome = {false, fmt("threw: %s", e.what())};
    } catch (const std::exception& e) {
      outcome = {false, fmt("threw: %s", e.what())};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("criterion %2d %s  [%5.1fs]  %s\n", number,
                outcome.pass ? "PASS" : "FAIL", seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
