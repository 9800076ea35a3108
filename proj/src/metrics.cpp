#include "snc/metrics.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <json.hpp>

#include "snc/dsp/fft.hpp"
#include "snc/errors.hpp"

namespace snc {

namespace {

void check_pair(const AudioBuffer& a, const AudioBuffer& b) {
  if (a.length() == 0) {
    throw Error(ErrorCode::Argument, "empty buffers");
  }
  if (a.length() != b.length() || a.channels() != b.channels() ||
      a.sample_rate() != b.sample_rate()) {
    throw Error(ErrorCode::Alignment,
                "reference and degraded buffers must match in length, "
                "channels, and rate");
  }
}

void check_params(const StftParams& p) {
  if (p.fft_size < 2 || p.hop < 1 || p.hop > p.fft_size) {
    throw Error(ErrorCode::Argument, "bad stft parameters (need 0 < hop <= fft)");
  }
}

// Magnitude spectrogram of one channel; frames that fit entirely.
std::vector<std::vector<double>> magnitude_frames(std::span<const double> x,
                                                  const dsp::RealFft& fft,
                                                  const std::vector<double>& window,
                                                  int hop) {
  const size_t n = fft.size();
  std::vector<std::vector<double>> frames;
  std::vector<double> buf(n);
  for (size_t s = 0; s + n <= x.size(); s += static_cast<size_t>(hop)) {
    for (size_t i = 0; i < n; ++i) buf[i] = x[s + i] * window[i];
    const auto spec = fft.forward(buf);
    std::vector<double> mag(spec.size());
    for (size_t k = 0; k < spec.size(); ++k) mag[k] = std::abs(spec[k]);
    frames.push_back(std::move(mag));
  }
  return frames;
}

struct EntropyAccumulation {
  double mean_bits = 0.0;
  size_t retained = 0;
};

// Mean per-frame entropy with the -60 dBFS gate; retained = 0 when every
// frame is below the gate (or nothing fits a frame).
EntropyAccumulation accumulate_entropy(const AudioBuffer& buffer,
                                       const StftParams& params) {
  const size_t n = static_cast<size_t>(params.fft_size);
  const dsp::RealFft fft(n);
  const auto window = dsp::hann_window(n);
  constexpr double kGateDb = -60.0;

  double sum_bits = 0.0;
  size_t retained = 0;
  std::vector<double> buf(n);
  std::vector<double> power(fft.bins());
  for (int c = 0; c < buffer.channels(); ++c) {
    auto x = buffer.channel(c);
    for (size_t s = 0; s + n <= x.size(); s += static_cast<size_t>(params.hop)) {
      double sum_sq = 0.0;
      for (size_t i = 0; i < n; ++i) sum_sq += x[s + i] * x[s + i];
      const double rms_db = 10.0 * std::log10(sum_sq / static_cast<double>(n) +
                                              std::numeric_limits<double>::min());
      if (rms_db < kGateDb) continue;

      for (size_t i = 0; i < n; ++i) buf[i] = x[s + i] * window[i];
      const auto spec = fft.forward(buf);
      double total = 0.0;
      for (size_t k = 0; k < spec.size(); ++k) {
        power[k] = std::norm(spec[k]);
        total += power[k];
      }
      if (total <= 0.0) continue;

      double h = 0.0;
      for (size_t k = 0; k < spec.size(); ++k) {
        const double p = power[k] / total;
        if (p > 0.0) h -= p * std::log2(p);
      }
      sum_bits += h;
      ++retained;
    }
  }
  EntropyAccumulation out;
  out.retained = retained;
  out.mean_bits = retained > 0 ? sum_bits / static_cast<double>(retained) : 0.0;
  return out;
}

}  // namespace

double spectral_convergence(const AudioBuffer& reference,
                            const AudioBuffer& degraded,
                            const StftParams& params) {
  check_pair(reference, degraded);
  check_params(params);
  const size_t n = static_cast<size_t>(params.fft_size);
  if (reference.length() < n) {
    throw Error(ErrorCode::Argument, "buffer shorter than one analysis frame");
  }
  const dsp::RealFft fft(n);
  const auto window = dsp::hann_window(n);

  double sum = 0.0;
  for (int c = 0; c < reference.channels(); ++c) {
    const auto ref = magnitude_frames(reference.channel(c), fft, window, params.hop);
    const auto deg = magnitude_frames(degraded.channel(c), fft, window, params.hop);
    double diff_sq = 0.0;
    double ref_sq = 0.0;
    for (size_t m = 0; m < ref.size(); ++m) {
      for (size_t k = 0; k < ref[m].size(); ++k) {
        const double d = ref[m][k] - deg[m][k];
        diff_sq += d * d;
        ref_sq += ref[m][k] * ref[m][k];
      }
    }
    if (ref_sq <= 0.0) {
      throw Error(ErrorCode::Undefined,
                  "spectral convergence undefined for a silent reference");
    }
    sum += std::sqrt(diff_sq) / std::sqrt(ref_sq);
  }
  return sum / reference.channels();
}

double snr_db(const AudioBuffer& reference, const AudioBuffer& degraded) {
  check_pair(reference, degraded);
  double signal = 0.0;
  double noise = 0.0;
  for (int c = 0; c < reference.channels(); ++c) {
    auto r = reference.channel(c);
    auto d = degraded.channel(c);
    for (size_t i = 0; i < r.size(); ++i) {
      signal += r[i] * r[i];
      const double e = r[i] - d[i];
      noise += e * e;
    }
  }
  if (signal <= 0.0) {
    throw Error(ErrorCode::Undefined, "snr undefined for a silent reference");
  }
  if (noise <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(signal / noise);
}

double spectral_entropy(const AudioBuffer& buffer, const StftParams& params) {
  check_params(params);
  if (buffer.length() == 0) {
    throw Error(ErrorCode::Argument, "empty buffer");
  }
  const auto acc = accumulate_entropy(buffer, params);
  if (acc.retained == 0) {
    throw Error(ErrorCode::Undefined,
                "spectral entropy undefined: every frame is below the gate");
  }
  return acc.mean_bits;
}

EntropyReport entropy_comparison(const StemSet& stems, const AudioBuffer& mix,
                                 const StftParams& params) {
  check_params(params);
  if (stems.empty()) {
    throw Error(ErrorCode::Argument, "no stems");
  }
  for (const auto& [kind, buffer] : stems.entries()) {
    if (buffer.length() != mix.length() || buffer.sample_rate() != mix.sample_rate() ||
        buffer.channels() != mix.channels()) {
      throw Error(ErrorCode::Alignment,
                  "stem " + std::string(to_label(kind)) +
                      " is not aligned with the mix");
    }
  }

  const auto mix_acc = accumulate_entropy(mix, params);
  if (mix_acc.retained == 0) {
    throw Error(ErrorCode::Undefined,
                "entropy comparison undefined: the mix is silent");
  }

  EntropyReport report;
  report.mix_entropy_bits = mix_acc.mean_bits;
  for (const auto& [kind, buffer] : stems.entries()) {
    const auto acc = accumulate_entropy(buffer, params);
    if (acc.retained == 0) continue;  // silent stem: no defined entropy
    const double weight =
        static_cast<double>(acc.retained) / static_cast<double>(mix_acc.retained);
    report.stem_entropy_bits[kind] = acc.mean_bits;
    report.stem_weight[kind] = weight;
    report.weighted_stem_sum_bits += weight * acc.mean_bits;
  }
  report.inequality_holds =
      report.weighted_stem_sum_bits < report.mix_entropy_bits;
  return report;
}

namespace {

// Infinities are not representable in JSON; carry them as strings so the
// sentinel survives serialization instead of degrading to null.
nlohmann::json json_db(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

}  // namespace

std::string quality_report_json(const QualityReport& report, bool pretty) {
  nlohmann::json sizes = nlohmann::json::object();
  for (const auto& [name, bytes] : report.sizes) sizes[name] = bytes;
  nlohmann::json doc{
      {"stoi", report.stoi},
      {"spectral_convergence", report.spectral_convergence},
      {"snr_db", json_db(report.snr_db)},
      {"residual",
       {{"rms_db", json_db(report.residual.rms_db)},
        {"peak_db", json_db(report.residual.peak_db)},
        {"energy_ratio", report.residual.energy_ratio},
        {"snr_db", json_db(report.residual.snr_db)}}},
      {"sizes", sizes}};
  return pretty ? doc.dump(2) : doc.dump();
}

}  // namespace snc
