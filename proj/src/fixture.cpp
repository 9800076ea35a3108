#include "snc/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "snc/errors.hpp"

namespace snc {

namespace {

constexpr int kRate = 48000;
constexpr double kTau = 2.0 * std::numbers::pi;

// Seeded xorshift64*, same construction the test suites use: sample data
// must be identical on every run and platform, which the standard library
// distributions do not promise.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  uint64_t next_u64() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  // Uniform in [-1, 1).
  double next_sample() {
    return static_cast<double>(next_u64() >> 11) * (2.0 / 9007199254740992.0) -
           1.0;
  }

 private:
  uint64_t state_;
};

// Speech-shaped "vocals": pink-ish noise ring-modulated by a wandering
// fundamental (the pitch), band-shaped by first-order filters, gated into
// syllables and phrases so there are real pauses for silence-aware metrics.
AudioBuffer fixture_vocals(size_t length) {
  AudioBuffer out(kRate, 2, length);
  Rng rng(0xF1);
  double pink0 = 0.0, pink1 = 0.0, pink2 = 0.0;
  double lowpass = 0.0, highpass_state = 0.0;
  const double lp_coef = 1.0 - std::exp(-kTau * 2500.0 / kRate);
  const double hp_coef = 1.0 - std::exp(-kTau * 130.0 / kRate);
  double pitch_phase = 0.0;
  for (size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / kRate;

    const double white = rng.next_sample();
    pink0 = 0.99765 * pink0 + white * 0.0990460;
    pink1 = 0.96300 * pink1 + white * 0.2965164;
    pink2 = 0.57000 * pink2 + white * 1.0526913;
    const double noise = 0.12 * (pink0 + pink1 + pink2 + white * 0.1848);

    // Pitch wanders around 170 Hz with slow inflection plus vibrato.
    const double f0 = 170.0 + 38.0 * std::sin(kTau * 0.37 * t) +
                      6.0 * std::sin(kTau * 5.3 * t);
    pitch_phase += kTau * f0 / kRate;
    const double voiced = noise * (0.35 + std::sin(pitch_phase));

    highpass_state += hp_coef * (voiced - highpass_state);
    lowpass += lp_coef * ((voiced - highpass_state) - lowpass);

    // Syllables at ~2.9 Hz inside phrases at ~0.21 Hz; the phrase gate
    // drops the level to zero for natural pauses.
    const double syllable = std::pow(std::abs(std::sin(kTau * 2.9 * t)), 0.7);
    const double phrase = std::sin(kTau * 0.21 * t) > -0.2 ? 1.0 : 0.0;
    const double sample = 1.35 * lowpass * syllable * phrase;
    out.channel(0)[i] = sample;
    out.channel(1)[i] = sample;
  }
  return out;
}

// Percussive "drums": decaying noise hits on a fixed grid — low-passed
// kicks with a pitch thump on the beat, broadband snares on the off-beat,
// short quiet hats on sixteenths.
AudioBuffer fixture_drums(size_t length) {
  AudioBuffer out(kRate, 2, length);
  const double beat_s = 60.0 / 110.0;  // 110 BPM

  struct Hit {
    double period_s;   // grid spacing
    double offset_s;   // grid phase
    double decay_s;    // envelope time constant
    double level;
    double lp_coef;    // one-pole low-pass inside the hit (1 = none)
    double thump_hz;   // decaying sine under the noise (0 = none)
    double pan;        // -1 left .. +1 right
    uint64_t seed;
  };
  const Hit kinds[] = {
      {2 * beat_s, 0.0, 0.110, 0.42, 0.08, 55.0, 0.0, 0xD1},       // kick
      {2 * beat_s, beat_s, 0.070, 0.30, 1.0, 0.0, 0.25, 0xD2},     // snare
      {beat_s / 2, beat_s / 4, 0.025, 0.10, 1.0, 0.0, -0.35, 0xD3}  // hats
  };

  for (const Hit& h : kinds) {
    Rng rng(h.seed);
    const double gain_l = std::sqrt(0.5 * (1.0 - h.pan));
    const double gain_r = std::sqrt(0.5 * (1.0 + h.pan));
    const size_t tail = static_cast<size_t>(6.0 * h.decay_s * kRate);
    for (double start = h.offset_s; start * kRate < (double)length;
         start += h.period_s) {
      const size_t begin = static_cast<size_t>(start * kRate);
      double lp = 0.0;
      for (size_t n = 0; n < tail && begin + n < length; ++n) {
        const double env =
            std::exp(-static_cast<double>(n) / (h.decay_s * kRate));
        double burst = rng.next_sample();
        lp += h.lp_coef * (burst - lp);
        double s = (h.lp_coef < 1.0 ? lp * 3.0 : burst) * env;
        if (h.thump_hz > 0.0) {
          s += 1.4 * env * std::sin(kTau * h.thump_hz * n / kRate);
        }
        s *= h.level;
        out.channel(0)[begin + n] += gain_l * s;
        out.channel(1)[begin + n] += gain_r * s;
      }
    }
  }
  return out;
}

// "Bass": band-limited saw tones (harmonics kept below 350 Hz, which is the
// low-pass) walking a four-note loop, with short ramps to avoid clicks.
AudioBuffer fixture_bass(size_t length) {
  AudioBuffer out(kRate, 2, length);
  const double notes[] = {55.0, 65.406, 48.999, 73.416};  // A1 C2 G1 D2
  const double note_s = 2.0;
  const size_t note_len = static_cast<size_t>(note_s * kRate);
  const size_t ramp = kRate / 100;  // 10 ms

  for (size_t i = 0; i < length; ++i) {
    const size_t note_index = (i / note_len) % 4;
    const double f = notes[note_index];
    const size_t pos = i % note_len;
    const double t = static_cast<double>(i) / kRate;

    double s = 0.0;
    for (int k = 1; k * f <= 350.0; ++k) {
      s += std::sin(kTau * k * f * t) / k;
    }
    double env = 1.0;
    if (pos < ramp) env = static_cast<double>(pos) / ramp;
    const size_t from_end = note_len - pos;
    if (from_end <= ramp) env = static_cast<double>(from_end) / ramp;
    const double sample = 0.16 * s * env;
    out.channel(0)[i] = sample;
    out.channel(1)[i] = sample;
  }
  return out;
}

// "Other": sustained chord pads — triads with detuned unisons per note,
// slow attacks, a little wider on the right channel via opposite detune.
AudioBuffer fixture_pads(size_t length) {
  AudioBuffer out(kRate, 2, length);
  const double chords[][3] = {
      {196.00, 246.94, 293.66},  // G
      {164.81, 196.00, 246.94},  // Em
      {130.81, 164.81, 196.00},  // C
      {146.83, 185.00, 220.00},  // D
  };
  const double chord_s = 7.5;
  const size_t chord_len = static_cast<size_t>(chord_s * kRate);

  for (size_t i = 0; i < length; ++i) {
    const size_t chord_index = (i / chord_len) % 4;
    const size_t pos = i % chord_len;
    const double t = static_cast<double>(i) / kRate;
    const double attack = std::min(1.0, static_cast<double>(pos) / (0.8 * kRate));
    const double release =
        std::min(1.0, static_cast<double>(chord_len - pos) / (0.4 * kRate));
    const double env = attack * release;

    double left = 0.0, right = 0.0;
    for (const double f : chords[chord_index]) {
      left += std::sin(kTau * f * 0.9985 * t) + std::sin(kTau * f * t);
      right += std::sin(kTau * f * 1.0015 * t) + std::sin(kTau * f * t);
    }
    out.channel(0)[i] = 0.035 * env * left;
    out.channel(1)[i] = 0.035 * env * right;
  }
  return out;
}

}  // namespace

StemSet make_fixture_stems(double seconds) {
  if (!(seconds > 0.0) || seconds > 600.0) {
    throw Error(ErrorCode::Argument, "fixture duration must be in (0, 600] s");
  }
  const auto length = static_cast<size_t>(std::llround(seconds * kRate));
  return StemSet({{StemKind::Vocals, fixture_vocals(length)},
                  {StemKind::Drums, fixture_drums(length)},
                  {StemKind::Bass, fixture_bass(length)},
                  {StemKind::Other, fixture_pads(length)}});
}

}  // namespace snc
