#include "snc/container.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "ebml.hpp"
#include "snc/codec.hpp"
#include "snc/errors.hpp"
#include "snc/metadata.hpp"
#include "support/test_signals.hpp"

using namespace snc;

namespace {

// Small but real: a quarter second of distinct content per stem.
std::map<StemKind, EncodedStream> encode_test_stems(int n_stems) {
  const auto hierarchy = BitrateHierarchy::defaults();
  std::map<StemKind, EncodedStream> out;
  int added = 0;
  for (StemKind kind : kAllStemKinds) {
    if (added == n_stems) break;
    test::Rng rng(0xC0 + added);
    AudioBuffer b(48000, 2, 12000);
    for (int c = 0; c < 2; ++c) {
      auto ch = b.channel(c);
      for (size_t i = 0; i < ch.size(); ++i) ch[i] = 0.25 * rng.next_sample();
    }
    out.emplace(kind, lossy_encode(b, hierarchy.stem_profile(kind)));
    ++added;
  }
  return out;
}

EncodedStream encode_test_residual() {
  test::Rng rng(0xE5);
  AudioBuffer b(48000, 2, 12000);
  for (int c = 0; c < 2; ++c) {
    auto ch = b.channel(c);
    for (size_t i = 0; i < ch.size(); ++i) ch[i] = 0.01 * rng.next_sample();
  }
  return lossy_encode(b, BitrateHierarchy::defaults().residual);
}

SncMetadata metadata_for(const std::map<StemKind, EncodedStream>& stems) {
  std::vector<StemKind> kinds;
  std::map<StemKind, int> rates;
  for (const auto& [kind, stream] : stems) {
    kinds.push_back(kind);
    rates[kind] = stream.nominal_bitrate_kbps;
  }
  return default_metadata(kinds, rates);
}

bool packets_equal(const EncodedStream& a, const EncodedStream& b) {
  if (a.packets.size() != b.packets.size()) return false;
  for (size_t i = 0; i < a.packets.size(); ++i) {
    if (a.packets[i].bytes != b.packets[i].bytes) return false;
  }
  return true;
}

// First match only; the needle must be unique enough for the patch target.
void patch_bytes(std::vector<uint8_t>& haystack, const std::string& needle,
                 const std::string& replacement) {
  REQUIRE(needle.size() == replacement.size());
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
  REQUIRE(it != haystack.end());
  std::copy(replacement.begin(), replacement.end(), it);
}

}  // namespace

TEST_CASE("mux/demux round-trips packets and metadata byte-exactly") {
  const auto stems = encode_test_stems(4);
  const auto residual = encode_test_residual();
  const auto metadata = metadata_for(stems);

  const auto bytes = mux_to_bytes(stems, residual, metadata);
  const SncFile file = demux_bytes(bytes);

  // 4 stems + residual + 1 attachment, names as labels.
  REQUIRE(file.streams.size() == 4);
  CHECK(file.violations.empty());
  CHECK(file.metadata_json == metadata_to_json(metadata));
  CHECK(file.metadata.residual_track == 5);

  for (const auto& [kind, original] : stems) {
    CAPTURE(to_label(kind));
    REQUIRE(file.streams.count(kind) == 1);
    const EncodedStream& got = file.streams.at(kind);
    CHECK(packets_equal(got, original));
    CHECK(got.sample_rate == original.sample_rate);
    CHECK(got.channels == original.channels);
    CHECK(got.preskip_samples == original.preskip_samples);
    CHECK(got.original_length == original.original_length);
    for (size_t i = 0; i < got.packets.size(); ++i) {
      CHECK(got.packets[i].samples == original.packets[i].samples);
    }
  }
  CHECK(packets_equal(file.residual_stream, residual));
  CHECK(file.residual_stream.original_length == residual.original_length);
  CHECK(file.residual_stream.preskip_samples == residual.preskip_samples);

  // Nominal rates: stems from their descriptors, residual not stored.
  CHECK(file.streams.at(StemKind::Vocals).nominal_bitrate_kbps == 128);
  CHECK(file.residual_stream.nominal_bitrate_kbps == 0);

  // Decoded audio is therefore identical too.
  const AudioBuffer direct = lossy_decode(stems.at(StemKind::Vocals));
  const AudioBuffer via_file = lossy_decode(file.streams.at(StemKind::Vocals));
  REQUIRE(direct.length() == via_file.length());
  for (int c = 0; c < direct.channels(); ++c) {
    auto a = direct.channel(c);
    auto b = via_file.channel(c);
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
  }

  // Component accounting: payloads recoverable, overhead is the remainder.
  CHECK(file.component_sizes.file == bytes.size());
  CHECK(file.component_sizes.attachment == file.metadata_json.size());
  CHECK(file.component_sizes.tracks.at("vocals") ==
        stems.at(StemKind::Vocals).payload_bytes());
  CHECK(file.component_sizes.tracks.at("residual") == residual.payload_bytes());
  CHECK(file.component_sizes.components_total() < bytes.size());
  CHECK(file.duration_s == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("muxing is deterministic") {
  const auto stems = encode_test_stems(3);
  const auto residual = encode_test_residual();
  const auto metadata = metadata_for(stems);
  const auto a = mux_to_bytes(stems, residual, metadata);
  const auto b = mux_to_bytes(stems, residual, metadata);
  CHECK(a == b);
}

TEST_CASE("single stem plus residual makes a two-track file") {
  const auto stems = encode_test_stems(1);
  const auto residual = encode_test_residual();
  const auto metadata = metadata_for(stems);
  REQUIRE(metadata.stems.size() == 1);

  const SncFile file = demux_bytes(mux_to_bytes(stems, residual, metadata));
  CHECK(file.streams.size() == 1);
  CHECK(file.streams.count(StemKind::Vocals) == 1);
  CHECK(file.metadata.residual_track == 2);
  CHECK(file.component_sizes.tracks.size() == 2);
}

TEST_CASE("empty-packet tracks survive the round trip") {
  auto stems = encode_test_stems(1);
  EncodedStream empty;
  empty.codec_id = "opus";
  empty.sample_rate = 48000;
  empty.channels = 2;
  empty.preskip_samples = 312;
  empty.original_length = 0;

  const SncFile file = demux_bytes(mux_to_bytes(stems, empty, metadata_for(stems)));
  CHECK(file.residual_stream.packets.empty());
  CHECK(file.residual_stream.original_length == 0);
}

TEST_CASE("mux input checking") {
  auto stems = encode_test_stems(2);
  const auto residual = encode_test_residual();
  auto metadata = metadata_for(stems);

  SUBCASE("metadata violations refuse to mux") {
    metadata.stems[0].permissions.gain_min_db = 5.0;
    try {
      mux_to_bytes(stems, residual, metadata);
      FAIL("expected a schema error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Schema);
      CHECK(std::string(e.what()).find("gain_min_db") != std::string::npos);
    }
  }
  SUBCASE("descriptor/stream mismatch refuses to mux") {
    stems.erase(StemKind::Drums);  // metadata still describes two stems
    CHECK_THROWS_AS(mux_to_bytes(stems, residual, metadata), Error);
  }
  SUBCASE("descriptor track numbers must match ordinal assignment") {
    std::swap(metadata.stems[0].track, metadata.stems[1].track);
    try {
      mux_to_bytes(stems, residual, metadata);
      FAIL("expected a schema error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Schema);
    }
  }
}

TEST_CASE("demux rejects non-snc input with the right code") {
  SUBCASE("random bytes") {
    std::vector<uint8_t> junk = {'R', 'I', 'F', 'F', 0, 1, 2, 3};
    try {
      demux_bytes(junk);
      FAIL("expected not-an-SNC");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSnc);
    }
  }
  SUBCASE("empty input") {
    try {
      demux_bytes({});
      FAIL("expected not-an-SNC");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSnc);
    }
  }
  SUBCASE("matroska without the metadata attachment") {
    // A structurally fine Matroska with one opus track and no attachment.
    auto stems = encode_test_stems(1);
    auto bytes = mux_to_bytes(stems, encode_test_residual(), metadata_for(stems));
    // Rename the attachment: the demuxer then sees no snc_meta.json.
    patch_bytes(bytes, "snc_meta.json", "avc_meta.json");
    try {
      demux_bytes(bytes);
      FAIL("expected not-an-SNC");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSnc);
      CHECK(std::string(e.what()).find("snc_meta.json") != std::string::npos);
    }
  }
  SUBCASE("wrong doctype") {
    ebml::Writer h;
    h.element_uint(0x4286, 1);
    h.element_string(0x4282, "webml");
    ebml::Writer f;
    f.element_master(0x1A45DFA3, h.bytes());
    try {
      demux_bytes(f.bytes());
      FAIL("expected not-an-SNC");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSnc);
    }
  }
}

TEST_CASE("demux reports malformed containers as parse errors with offsets") {
  auto stems = encode_test_stems(1);
  const auto good = mux_to_bytes(stems, encode_test_residual(), metadata_for(stems));

  SUBCASE("truncated file") {
    std::vector<uint8_t> cut(good.begin(), good.begin() + good.size() * 3 / 5);
    try {
      demux_bytes(cut);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      CHECK(e.byte_offset().has_value());
    }
  }
  SUBCASE("EBML header only, no segment") {
    std::vector<uint8_t> cut(good.begin(), good.begin() + 45);  // header is 43 B
    CHECK_THROWS_AS(demux_bytes(cut), Error);
  }
}

TEST_CASE("demux rejects schema breaks in the track layout") {
  auto stems = encode_test_stems(1);
  const auto residual = encode_test_residual();
  const auto metadata = metadata_for(stems);

  SUBCASE("unknown track name") {
    auto bytes = mux_to_bytes(stems, residual, metadata);
    // Tracks precede the attachment, so the first occurrence is the name.
    patch_bytes(bytes, "vocals", "guitar");
    try {
      demux_bytes(bytes);
      FAIL("expected a schema error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Schema);
      CHECK(std::string(e.what()).find("guitar") != std::string::npos);
    }
  }
  SUBCASE("codec other than opus") {
    auto bytes = mux_to_bytes(stems, residual, metadata);
    patch_bytes(bytes, "A_OPUS", "A_FLAC");
    try {
      demux_bytes(bytes);
      FAIL("expected a schema error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Schema);
    }
  }
}

TEST_CASE("metadata range violations demux as data, not errors") {
  auto stems = encode_test_stems(1);
  auto bytes = mux_to_bytes(stems, encode_test_residual(), metadata_for(stems));
  // Same-length JSON patch: upper gain bound becomes negative.
  patch_bytes(bytes, "\"gain_max_db\":12.0", "\"gain_max_db\":-2.0");

  const SncFile file = demux_bytes(bytes);
  REQUIRE(!file.violations.empty());
  CHECK(file.violations[0].path == "stems[0].permissions.gain_max_db");
  CHECK(file.metadata.stems[0].permissions.gain_max_db == -2.0);
}

TEST_CASE("path round trip and io errors") {
  const std::string path = "test_container_roundtrip.snc";
  auto stems = encode_test_stems(1);
  const auto residual = encode_test_residual();
  const auto metadata = metadata_for(stems);

  const size_t written = mux(stems, residual, metadata, path);
  CHECK(written == mux_to_bytes(stems, residual, metadata).size());
  const SncFile file = demux(path);
  CHECK(file.component_sizes.file == written);
  CHECK(packets_equal(file.streams.at(StemKind::Vocals), stems.at(StemKind::Vocals)));
  std::remove(path.c_str());

  try {
    demux("no_such_file.snc");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  try {
    mux(stems, residual, metadata, "no_such_dir/out.snc");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("ebml primitives round-trip") {
  ebml::Writer w;
  w.element_uint(0x4286, 0);
  w.element_uint(0x4286, 127);
  w.element_uint(0x4286, 128);
  w.element_uint(0x4286, 1u << 21);
  w.element_sint(0x75A2, -1);
  w.element_sint(0x75A2, 6500000);
  w.element_sint(0x75A2, -6500000);
  w.element_float(0xB5, 48000.0);
  w.element_string(0x4282, "matroska");
  const auto bytes = w.take();

  ebml::Reader r(bytes.data(), bytes.size());
  ebml::Element e;
  REQUIRE(r.next(e));
  CHECK(ebml::uint_value(e) == 0);
  REQUIRE(r.next(e));
  CHECK(ebml::uint_value(e) == 127);
  REQUIRE(r.next(e));
  CHECK(ebml::uint_value(e) == 128);
  REQUIRE(r.next(e));
  CHECK(ebml::uint_value(e) == 1u << 21);
  REQUIRE(r.next(e));
  CHECK(ebml::sint_value(e) == -1);
  REQUIRE(r.next(e));
  CHECK(ebml::sint_value(e) == 6500000);
  REQUIRE(r.next(e));
  CHECK(ebml::sint_value(e) == -6500000);
  REQUIRE(r.next(e));
  CHECK(ebml::float_value(e) == 48000.0);
  REQUIRE(r.next(e));
  CHECK(ebml::string_value(e) == "matroska");
  CHECK(!r.next(e));

  // Framing damage is caught, with the failing offset.
  std::vector<uint8_t> bad = {0x42, 0x86};  // id, then nothing
  ebml::Reader br(bad.data(), bad.size());
  try {
    br.next(e);
    FAIL("expected a parse error");
  } catch (const Error& ex) {
    CHECK(ex.code() == ErrorCode::Parse);
    REQUIRE(ex.byte_offset().has_value());
    CHECK(*ex.byte_offset() == 2);
  }
}
