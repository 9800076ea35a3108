// Short-time objective intelligibility, the standard 2011 formulation.
// Fixed pipeline: mean downmix to mono, resample to 10 kHz, silent-frame
// removal driven by the clean signal, 256/128 STFT zero-padded to 512,
// 15 one-third-octave bands from 150 Hz, 30-frame segments with per-band
// normalization and a -15 dB SDR clip, correlation averaged over all
// band/segment cells.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "snc/dsp/fft.hpp"
#include "snc/errors.hpp"
#include "snc/metrics.hpp"
#include "snc/resample.hpp"

namespace snc {

namespace {

constexpr int kRate = 10000;
constexpr int kFrame = 256;
constexpr int kHop = 128;
constexpr int kFftSize = 512;
constexpr int kBands = 15;
constexpr double kBandStartHz = 150.0;
constexpr int kSegmentFrames = 30;
constexpr double kDynRangeDb = 40.0;
// -15 dB SDR lower bound: clip at x * (1 + 10^(15/20)).
const double kClipFactor = 1.0 + std::pow(10.0, 15.0 / 20.0);

std::vector<double> mono_10k(const AudioBuffer& buffer) {
  AudioBuffer mono = buffer.channels() == 1 ? buffer : downmix_mono(buffer);
  if (mono.sample_rate() != kRate) mono = resample(mono, kRate);
  auto ch = mono.channel(0);
  return std::vector<double>(ch.begin(), ch.end());
}

// Drops frames more than 40 dB below the loudest clean frame, judged on the
// reference only, and rebuilds both signals by windowed overlap-add of the
// retained frames.
void remove_silent_frames(std::vector<double>& x, std::vector<double>& y) {
  if (x.size() < kFrame) {
    x.clear();
    y.clear();
    return;
  }
  const auto window = dsp::hann_window(kFrame);
  std::vector<size_t> starts;
  for (size_t s = 0; s + kFrame <= x.size(); s += kHop) starts.push_back(s);

  std::vector<double> energy_db(starts.size());
  double max_db = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < starts.size(); ++j) {
    double sum_sq = 0.0;
    for (int i = 0; i < kFrame; ++i) {
      const double v = x[starts[j] + i] * window[i];
      sum_sq += v * v;
    }
    energy_db[j] = 10.0 * std::log10(sum_sq + std::numeric_limits<double>::min());
    max_db = std::max(max_db, energy_db[j]);
  }

  std::vector<size_t> kept;
  for (size_t j = 0; j < starts.size(); ++j) {
    if (energy_db[j] > max_db - kDynRangeDb) kept.push_back(starts[j]);
  }

  const size_t out_len = kept.empty() ? 0 : (kept.size() - 1) * kHop + kFrame;
  std::vector<double> xs(out_len, 0.0);
  std::vector<double> ys(out_len, 0.0);
  for (size_t j = 0; j < kept.size(); ++j) {
    const size_t out = j * kHop;
    for (int i = 0; i < kFrame; ++i) {
      xs[out + i] += x[kept[j] + i] * window[i];
      ys[out + i] += y[kept[j] + i] * window[i];
    }
  }
  x = std::move(xs);
  y = std::move(ys);
}

// One-third-octave band energies per frame: band j spans center*2^(-1/6)
// to center*2^(1/6) with centers 150*2^(j/3), mapped to the nearest FFT
// bins. Returns bands x frames.
std::vector<std::vector<double>> band_spectrogram(const std::vector<double>& x) {
  const dsp::RealFft fft(kFftSize);
  const auto window = dsp::hann_window(kFrame);

  std::vector<std::vector<double>> power;  // frames x bins
  std::vector<double> buf(kFftSize, 0.0);
  for (size_t s = 0; s + kFrame <= x.size(); s += kHop) {
    for (int i = 0; i < kFrame; ++i) buf[i] = x[s + i] * window[i];
    std::fill(buf.begin() + kFrame, buf.end(), 0.0);
    const auto spec = fft.forward(buf);
    std::vector<double> p(spec.size());
    for (size_t k = 0; k < spec.size(); ++k) p[k] = std::norm(spec[k]);
    power.push_back(std::move(p));
  }

  const size_t bins = static_cast<size_t>(kFftSize) / 2 + 1;
  auto nearest_bin = [&](double hz) {
    const double exact = hz * kFftSize / kRate;
    const auto bin = static_cast<size_t>(std::llround(exact));
    return std::min(bin, bins - 1);
  };

  std::vector<std::vector<double>> bands(kBands,
                                         std::vector<double>(power.size(), 0.0));
  for (int j = 0; j < kBands; ++j) {
    const double cf = kBandStartHz * std::pow(2.0, j / 3.0);
    const size_t lo = nearest_bin(cf / std::pow(2.0, 1.0 / 6.0));
    const size_t hi = nearest_bin(cf * std::pow(2.0, 1.0 / 6.0));
    for (size_t m = 0; m < power.size(); ++m) {
      double sum = 0.0;
      for (size_t k = lo; k < hi; ++k) sum += power[m][k];
      bands[j][m] = std::sqrt(sum);
    }
  }
  return bands;
}

}  // namespace

double stoi(const AudioBuffer& reference, const AudioBuffer& degraded) {
  if (reference.length() == 0) {
    throw Error(ErrorCode::Argument, "empty buffers");
  }
  if (reference.length() != degraded.length() ||
      reference.channels() != degraded.channels() ||
      reference.sample_rate() != degraded.sample_rate()) {
    throw Error(ErrorCode::Alignment,
                "reference and degraded buffers must match in length, "
                "channels, and rate");
  }

  std::vector<double> x = mono_10k(reference);
  std::vector<double> y = mono_10k(degraded);
  remove_silent_frames(x, y);

  const auto xb = band_spectrogram(x);
  const auto yb = band_spectrogram(y);
  const size_t frames = xb.empty() ? 0 : xb[0].size();
  if (frames < kSegmentFrames) {
    throw Error(ErrorCode::Argument,
                "input too short for stoi: " + std::to_string(frames) +
                    " frames after silence removal, need " +
                    std::to_string(kSegmentFrames));
  }

  const double eps = std::numeric_limits<double>::epsilon();
  double sum = 0.0;
  size_t cells = 0;
  std::vector<double> xs(kSegmentFrames);
  std::vector<double> ys(kSegmentFrames);
  for (size_t m = kSegmentFrames; m <= frames; ++m) {
    for (int j = 0; j < kBands; ++j) {
      double x_sq = 0.0;
      double y_sq = 0.0;
      for (int i = 0; i < kSegmentFrames; ++i) {
        xs[i] = xb[j][m - kSegmentFrames + i];
        ys[i] = yb[j][m - kSegmentFrames + i];
        x_sq += xs[i] * xs[i];
        y_sq += ys[i] * ys[i];
      }
      const double alpha = std::sqrt(x_sq / (y_sq + eps));
      double x_mean = 0.0;
      double y_mean = 0.0;
      for (int i = 0; i < kSegmentFrames; ++i) {
        ys[i] = std::min(alpha * ys[i], xs[i] * kClipFactor);
        x_mean += xs[i];
        y_mean += ys[i];
      }
      x_mean /= kSegmentFrames;
      y_mean /= kSegmentFrames;

      double dot = 0.0;
      double xn = 0.0;
      double yn = 0.0;
      for (int i = 0; i < kSegmentFrames; ++i) {
        const double a = xs[i] - x_mean;
        const double b = ys[i] - y_mean;
        dot += a * b;
        xn += a * a;
        yn += b * b;
      }
      sum += dot / (std::sqrt(xn) * std::sqrt(yn) + eps);
      ++cells;
    }
  }
  return std::clamp(sum / static_cast<double>(cells), 0.0, 1.0);
}

}  // namespace snc
