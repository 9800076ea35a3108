#include "snc/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "snc/errors.hpp"

namespace snc {

namespace {

// Kernel resolution: table entries per input-sample unit. With linear
// interpolation between entries this keeps the tabulation error far below
// the window's own stopband (~ -100 dB for beta = 10).
constexpr int kTableSteps = 256;
constexpr double kBeta = 10.0;
constexpr int kZeroCrossings = 64;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double kaiser(double x, double denom) {
  // x in [-1, 1]; denom = I0(beta).
  const double t = 1.0 - x * x;
  if (t < 0.0) return 0.0;
  return std::cyl_bessel_i(0.0, kBeta * std::sqrt(t)) / denom;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& input, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::Argument, "target sample rate must be positive");
  }
  if (input.sample_rate() == target_rate) return input;

  const int src_rate = input.sample_rate();
  const size_t in_len = input.length();
  const auto out_len = static_cast<size_t>(std::llround(
      static_cast<double>(in_len) * target_rate / src_rate));
  if (in_len == 0 || out_len == 0) {
    return AudioBuffer(target_rate, input.channels(), 0);
  }

  // Anti-aliasing cutoff relative to the source Nyquist; widen the kernel
  // when downsampling so it still spans kZeroCrossings of the narrowed sinc.
  const double cutoff =
      std::min(1.0, static_cast<double>(target_rate) / src_rate);
  const double half_width = kZeroCrossings / cutoff;

  const auto table_len =
      static_cast<size_t>(half_width * kTableSteps) + 2;
  std::vector<double> table(table_len);
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);
  for (size_t k = 0; k < table_len; ++k) {
    const double t = static_cast<double>(k) / kTableSteps;
    table[k] = cutoff * sinc(cutoff * t) * kaiser(t / half_width, i0_beta);
  }

  AudioBuffer out(target_rate, input.channels(), out_len);
  for (int c = 0; c < input.channels(); ++c) {
    auto src = input.channel(c);
    auto dst = out.channel(c);
    for (size_t j = 0; j < out_len; ++j) {
      // Exact center position: j*src_rate fits in 64 bits without rounding.
      const double t0 = static_cast<double>(j * static_cast<uint64_t>(src_rate)) /
                        target_rate;
      const auto i_first = static_cast<int64_t>(std::ceil(t0 - half_width));
      const auto i_last = static_cast<int64_t>(std::floor(t0 + half_width));
      const int64_t lo = std::max<int64_t>(i_first, 0);
      const int64_t hi = std::min<int64_t>(i_last, static_cast<int64_t>(in_len) - 1);

      double acc = 0.0;
      double wsum = 0.0;
      for (int64_t i = lo; i <= hi; ++i) {
        const double dt = std::abs(static_cast<double>(i) - t0) * kTableSteps;
        const auto idx = static_cast<size_t>(dt);
        if (idx + 1 >= table_len) continue;
        const double frac = dt - static_cast<double>(idx);
        const double h = table[idx] + frac * (table[idx + 1] - table[idx]);
        acc += src[static_cast<size_t>(i)] * h;
        wsum += h;
      }
      // Normalizing by the in-range kernel mass keeps DC exact and removes
      // window ripple; at the edges it acts as constant extension.
      dst[j] = wsum != 0.0 ? acc / wsum : 0.0;
    }
  }
  return out;
}

}  // namespace snc
