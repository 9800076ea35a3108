#include <doctest.h>

#include <cmath>

#include "snc/errors.hpp"
#include "snc/fixture.hpp"
#include "snc/loudness.hpp"
#include "support/error_checks.hpp"

using namespace snc;

TEST_CASE("fixture stems have the advertised shape") {
  const StemSet stems = make_fixture_stems(3.0);
  CHECK(stems.sample_rate() == 48000);
  CHECK(stems.channels() == 2);
  CHECK(stems.length() == size_t(3.0 * 48000));
  CHECK(stems.entries().size() == 4);
  for (StemKind kind : {StemKind::Vocals, StemKind::Drums, StemKind::Bass,
                        StemKind::Other}) {
    CHECK(stems.has(kind));
  }
}

TEST_CASE("fixture is deterministic across calls") {
  const StemSet a = make_fixture_stems(2.0);
  const StemSet b = make_fixture_stems(2.0);
  for (const auto& [kind, buffer] : a.entries()) {
    const AudioBuffer& other = b.at(kind);
    REQUIRE(other.length() == buffer.length());
    for (int c = 0; c < buffer.channels(); ++c) {
      for (size_t i = 0; i < buffer.length(); ++i) {
        REQUIRE(buffer.channel(c)[i] == other.channel(c)[i]);
      }
    }
  }
}

TEST_CASE("every fixture stem carries real signal at a sane level") {
  const StemSet stems = make_fixture_stems(5.0);
  for (const auto& [kind, buffer] : stems.entries()) {
    const double rms = rms_dbfs(buffer);
    // Loud enough to matter in the mix, quiet enough to leave headroom.
    CHECK(rms > -40.0);
    CHECK(rms < -6.0);
  }
  // The summed mix may exceed full scale; the encode path normalizes it
  // down to the loudness target before anything is stored.
  const AudioBuffer mix = mix_sum(stems);
  CHECK(measure_integrated_lufs(mix) > -24.0);
}

TEST_CASE("fixture duration is validated") {
  CHECK_THROWS_AS_CODE(make_fixture_stems(0.0), ErrorCode::Argument);
  CHECK_THROWS_AS_CODE(make_fixture_stems(-1.0), ErrorCode::Argument);
  CHECK_THROWS_AS_CODE(make_fixture_stems(601.0), ErrorCode::Argument);
}
