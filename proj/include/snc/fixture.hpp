#pragma once

#include "snc/audio_buffer.hpp"

namespace snc {

// Deterministic synthetic session: four seeded stereo stems at 48 kHz —
// speech-shaped vocals (filtered noise bursts with pitch modulation),
// percussive drums (decaying noise hits), bass (band-limited saw tones),
// and chord pads — for reproducible end-to-end runs. The session mix is
// mix_sum() of the set. Every call with the same duration returns
// bit-identical audio.
StemSet make_fixture_stems(double seconds = 30.0);

}  // namespace snc
