#include "snc/loudness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "snc/errors.hpp"

namespace snc {

namespace detail {

Biquad k_shelf(int sample_rate) {
  // Spectral-shaping stage (+4 dB high shelf). The published decomposition
  // of the standard's fixed 48 kHz table; the 0.4997 band-gain exponent is
  // what makes the bilinear redesign land on the table exactly.
  constexpr double fc = 1681.9744509555319;
  constexpr double gain_db = 3.999843853973347;
  constexpr double q = 0.7071752369554196;

  const double k = std::tan(std::numbers::pi * fc / sample_rate);
  const double vh = std::pow(10.0, gain_db / 20.0);
  const double vb = std::pow(vh, 0.499666774155);
  const double a0 = 1.0 + k / q + k * k;
  return Biquad{
      (vh + vb * k / q + k * k) / a0,
      2.0 * (k * k - vh) / a0,
      (vh - vb * k / q + k * k) / a0,
      2.0 * (k * k - 1.0) / a0,
      (1.0 - k / q + k * k) / a0,
  };
}

Biquad k_highpass(int sample_rate) {
  constexpr double fc = 38.13547087602444;
  constexpr double q = 0.5003270373238773;

  const double k = std::tan(std::numbers::pi * fc / sample_rate);
  const double a0 = 1.0 + k / q + k * k;
  // The standard pins the numerator at [1, -2, 1] rather than the
  // unity-gain form; keep that quirk so 48 kHz matches the table.
  return Biquad{
      1.0,
      -2.0,
      1.0,
      2.0 * (k * k - 1.0) / a0,
      (1.0 - k / q + k * k) / a0,
  };
}

namespace {

std::vector<double> run_biquad(const Biquad& f, std::span<const double> x) {
  std::vector<double> y(x.size());
  double z1 = 0.0, z2 = 0.0;  // transposed direct form II
  for (size_t i = 0; i < x.size(); ++i) {
    const double out = f.b0 * x[i] + z1;
    z1 = f.b1 * x[i] - f.a1 * out + z2;
    z2 = f.b2 * x[i] - f.a2 * out;
    y[i] = out;
  }
  return y;
}

}  // namespace

}  // namespace detail

double measure_integrated_lufs(const AudioBuffer& buffer) {
  if (buffer.empty()) {
    throw Error(ErrorCode::Argument, "loudness of an empty buffer is undefined");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int fs = buffer.sample_rate();
  const auto shelf = detail::k_shelf(fs);
  const auto hp = detail::k_highpass(fs);

  std::vector<std::vector<double>> weighted;
  for (int c = 0; c < buffer.channels(); ++c) {
    weighted.push_back(
        detail::run_biquad(hp, detail::run_biquad(shelf, buffer.channel(c))));
  }

  const size_t n = buffer.length();
  size_t block = static_cast<size_t>(std::llround(0.4 * fs));
  const size_t hop = std::max<size_t>(1, static_cast<size_t>(std::llround(0.1 * fs)));
  std::vector<size_t> starts;
  if (n < block) {
    block = n;  // degenerate short input: one block over everything
    starts.push_back(0);
  } else {
    for (size_t s = 0; s + block <= n; s += hop) starts.push_back(s);
  }

  // Per block, per channel mean square of the K-weighted signal.
  const auto nch = static_cast<size_t>(buffer.channels());
  std::vector<std::vector<double>> z(starts.size(), std::vector<double>(nch));
  for (size_t j = 0; j < starts.size(); ++j) {
    for (size_t c = 0; c < nch; ++c) {
      double acc = 0.0;
      const double* p = weighted[c].data() + starts[j];
      for (size_t i = 0; i < block; ++i) acc += p[i] * p[i];
      z[j][c] = acc / static_cast<double>(block);
    }
  }

  auto block_loudness = [](const std::vector<double>& zj) {
    double sum = 0.0;
    for (double v : zj) sum += v;
    return sum > 0.0 ? -0.691 + 10.0 * std::log10(sum) : -kInf;
  };

  // Absolute gate at -70 LUFS.
  std::vector<const std::vector<double>*> abs_kept;
  for (const auto& zj : z) {
    if (block_loudness(zj) > -70.0) abs_kept.push_back(&zj);
  }
  if (abs_kept.empty()) return -kInf;

  // Relative gate 10 LU below the mean of the absolutely gated blocks.
  std::vector<double> mean_z(nch, 0.0);
  for (const auto* zj : abs_kept) {
    for (size_t c = 0; c < nch; ++c) mean_z[c] += (*zj)[c];
  }
  for (double& v : mean_z) v /= static_cast<double>(abs_kept.size());
  const double gamma_r = block_loudness(mean_z) - 10.0;

  std::vector<double> final_z(nch, 0.0);
  size_t kept = 0;
  for (const auto* zj : abs_kept) {
    if (block_loudness(*zj) > gamma_r) {
      for (size_t c = 0; c < nch; ++c) final_z[c] += (*zj)[c];
      ++kept;
    }
  }
  if (kept == 0) return -kInf;
  for (double& v : final_z) v /= static_cast<double>(kept);
  return block_loudness(final_z);
}

std::pair<AudioBuffer, LoudnessResult> normalize_lufs(const AudioBuffer& buffer,
                                                      double target_lufs) {
  const double measured = measure_integrated_lufs(buffer);
  if (std::isinf(measured)) {
    return {buffer, LoudnessResult{measured, 0.0}};
  }
  const double gain_db = target_lufs - measured;
  return {apply_gain(buffer, db_to_linear(gain_db)),
          LoudnessResult{measured, gain_db}};
}

AudioBuffer apply_peak_ceiling(const AudioBuffer& buffer, double ceiling_dbfs) {
  if (buffer.empty()) return buffer;
  double peak = 0.0;
  for (int c = 0; c < buffer.channels(); ++c) {
    for (double s : buffer.channel(c)) peak = std::max(peak, std::abs(s));
  }
  const double ceiling = db_to_linear(ceiling_dbfs);
  // Strictly-above test with a relative guard so that a buffer whose peak
  // already sits at the ceiling (e.g. output of a previous application)
  // passes through bit-identical.
  if (peak <= ceiling * (1.0 + 1e-12)) return buffer;
  return apply_gain(buffer, ceiling / peak);
}

}  // namespace snc
