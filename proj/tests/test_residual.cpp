#include <cmath>
#include <map>

#include "doctest.h"
#include "snc/audio_buffer.hpp"
#include "snc/codec.hpp"
#include "snc/errors.hpp"
#include "snc/residual.hpp"
#include "support/test_signals.hpp"

using namespace snc;

TEST_CASE("procedural_mix") {
  SUBCASE("two identical stems double the signal") {
    AudioBuffer x = test::make_noise(48000, 2, 500, 0.4, 1);
    std::map<StemKind, AudioBuffer> m;
    m.emplace(StemKind::Vocals, x);
    m.emplace(StemKind::Drums, x);
    AudioBuffer mixed = procedural_mix(StemSet(std::move(m)));
    for (size_t i = 0; i < x.length(); ++i) {
      REQUIRE(mixed.channel(0)[i] == 2.0 * x.channel(0)[i]);
    }
  }
  SUBCASE("empty set is an argument error") {
    CHECK_THROWS_AS(procedural_mix(StemSet{}), Error);
  }
}

TEST_CASE("compute_residual") {
  SUBCASE("procedural equal to original gives all zeros") {
    AudioBuffer x = test::make_noise(48000, 2, 333, 0.7, 2);
    AudioBuffer r = compute_residual(x, x);
    for (int c = 0; c < 2; ++c) {
      for (double s : r.channel(c)) REQUIRE(s == 0.0);
    }
  }
  SUBCASE("constant example: 0.5 - 0.3 = 0.2") {
    AudioBuffer m(48000, 1, 4), p(48000, 1, 4);
    for (size_t i = 0; i < 4; ++i) {
      m.channel(0)[i] = 0.5;
      p.channel(0)[i] = 0.3;
    }
    AudioBuffer r = compute_residual(m, p);
    CHECK(r.channel(0)[0] == doctest::Approx(0.2));
  }
  SUBCASE("length mismatch is an alignment error, never a truncation") {
    AudioBuffer m(48000, 1, 10), p(48000, 1, 9);
    try {
      compute_residual(m, p);
      FAIL("expected an alignment error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Alignment);
    }
  }
}

TEST_CASE("residual_stats") {
  SUBCASE("residual at one tenth of the original") {
    AudioBuffer m = test::make_noise(48000, 2, 4800, 0.5, 3);
    AudioBuffer r = apply_gain(m, 0.1);
    ResidualStats s = residual_stats(m, r);
    CHECK(s.snr_db == doctest::Approx(20.0).epsilon(1e-6 / 20));
    CHECK(s.energy_ratio == doctest::Approx(0.01).epsilon(1e-9));
  }
  SUBCASE("zero residual") {
    AudioBuffer m = test::make_noise(48000, 2, 1000, 0.5, 4);
    ResidualStats s = residual_stats(m, AudioBuffer(48000, 2, 1000));
    CHECK(std::isinf(s.snr_db));
    CHECK(s.snr_db > 0);
    CHECK(s.energy_ratio == 0.0);
  }
  SUBCASE("silent original is undefined") {
    AudioBuffer quiet(48000, 2, 1000);
    AudioBuffer r = test::make_noise(48000, 2, 1000, 0.1, 5);
    try {
      residual_stats(quiet, r);
      FAIL("expected an undefined-metric error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Undefined);
    }
  }
  SUBCASE("snr and energy ratio are the same quantity in two scales") {
    AudioBuffer m = test::make_music_like(48000, 2, 24000, 6);
    AudioBuffer r = test::make_noise(48000, 2, 24000, 0.03, 7);
    ResidualStats s = residual_stats(m, r);
    CHECK(s.snr_db == doctest::Approx(-10.0 * std::log10(s.energy_ratio))
                          .epsilon(1e-9));
    CHECK(s.peak_db >= s.rms_db);
  }
}

TEST_CASE("reconstruct") {
  SUBCASE("stems plus zero residual below the ceiling reproduce the sum") {
    std::map<StemKind, AudioBuffer> m;
    uint64_t seed = 30;
    for (StemKind kind : kAllStemKinds) {
      m.emplace(kind, test::make_noise(48000, 2, 2400, 0.05, seed++));
    }
    StemSet stems(std::move(m));
    AudioBuffer expect = procedural_mix(stems);
    AudioBuffer out = reconstruct(stems, AudioBuffer(48000, 2, 2400));
    for (int c = 0; c < 2; ++c) {
      for (size_t i = 0; i < out.length(); ++i) {
        REQUIRE(out.channel(c)[i] == expect.channel(c)[i]);
      }
    }
  }
  SUBCASE("a hot reconstruction is pulled to exactly the ceiling") {
    std::map<StemKind, AudioBuffer> m;
    m.emplace(StemKind::Vocals, test::make_sine(48000, 2, 4800, 440.0, 0.8));
    m.emplace(StemKind::Other, test::make_sine(48000, 2, 4800, 440.0, 0.8));
    StemSet stems(std::move(m));
    AudioBuffer out = reconstruct(stems, AudioBuffer(48000, 2, 4800));
    CHECK(peak_dbfs(out) == doctest::Approx(-0.1).epsilon(1e-9));
  }
  SUBCASE("misaligned residual is an alignment error") {
    std::map<StemKind, AudioBuffer> m;
    m.emplace(StemKind::Vocals, AudioBuffer(48000, 2, 100));
    StemSet stems(std::move(m));
    CHECK_THROWS_AS(reconstruct(stems, AudioBuffer(48000, 2, 99)), Error);
  }
}

TEST_CASE("exact identity through a real lossy roundtrip") {
  // The load-bearing property: after quantizing the normalized mix to the
  // 2^-31 grid, and with decoded stems quantized the same way by
  // lossy_decode, mix = procedural + residual holds bit-exactly in double.
  std::map<StemKind, AudioBuffer> m;
  m.emplace(StemKind::Vocals, test::make_music_like(48000, 2, 48000, 41));
  m.emplace(StemKind::Drums, test::make_noise(48000, 2, 48000, 0.2, 42));
  m.emplace(StemKind::Bass, test::make_sine(48000, 2, 48000, 55.0, 0.3));
  m.emplace(StemKind::Other, test::make_pink_noise(48000, 2, 48000, 0.25, 43));
  StemSet stems(std::move(m));

  AudioBuffer mix = quantize_grid(mix_sum(stems));

  const auto hierarchy = BitrateHierarchy::defaults();
  std::map<StemKind, AudioBuffer> decoded;
  for (StemKind kind : kAllStemKinds) {
    decoded.emplace(kind,
                    roundtrip(stems.at(kind), hierarchy.stem_profile(kind)));
  }
  StemSet decoded_set(std::move(decoded));

  AudioBuffer procedural = procedural_mix(decoded_set);
  AudioBuffer residual = compute_residual(mix, procedural);
  AudioBuffer rebuilt = add(procedural, residual);

  for (int c = 0; c < 2; ++c) {
    for (size_t i = 0; i < mix.length(); ++i) {
      REQUIRE(rebuilt.channel(c)[i] == mix.channel(c)[i]);
    }
  }
}
