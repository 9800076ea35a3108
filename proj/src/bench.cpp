#include "snc/bench.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "snc/errors.hpp"

namespace snc {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char out[64];
  std::snprintf(out, sizeof(out), spec, value);
  return out;
}

// Finite doubles only; infinities become "inf"/"-inf" strings, matching the
// quality-report convention, so the JSON stays parseable everywhere.
json json_number(double value) {
  if (std::isinf(value)) return value > 0 ? json("inf") : json("-inf");
  return json(value);
}

const BenchBaseline* find_lossless(const BenchReport& report) {
  for (const auto& baseline : report.baselines) {
    if (!report.lossless_label.empty() &&
        baseline.label == report.lossless_label && baseline.bytes > 0) {
      return &baseline;
    }
  }
  return nullptr;
}

double reduction_pct(size_t bytes, size_t reference_bytes) {
  return (1.0 - double(bytes) / double(reference_bytes)) * 100.0;
}

std::vector<HypothesisResult> evaluate_hypotheses(const BenchReport& report) {
  std::vector<HypothesisResult> out;

  HypothesisResult h1{"H1", "Size reduction vs. lossless baseline",
                      "40-60% reduction (marginal >= 30%)", "n/a", "n/a"};
  if (const BenchBaseline* lossless = find_lossless(report)) {
    const double r = reduction_pct(report.snc_bytes, lossless->bytes);
    h1.actual = fmt("%.1f%%", r);
    if (r >= 40.0 && r <= 60.0) {
      h1.verdict = "pass";
    } else if (r >= 30.0) {
      h1.verdict = "marginal";
    } else {
      h1.verdict = "fail";
    }
  }
  out.push_back(h1);

  HypothesisResult h2{"H2", "Intelligibility preserved through the codec",
                      "STOI > 0.95", fmt("%.4f", report.quality.stoi),
                      report.quality.stoi > 0.95 ? "pass" : "fail"};
  out.push_back(h2);

  const double rms = report.quality.residual.rms_db;
  HypothesisResult h3{"H3", "Mastering residual energy is low",
                      "residual RMS < -30 dBFS (marginal to -25)",
                      fmt("%.2f dBFS", rms), "fail"};
  if (rms < -30.0) {
    h3.verdict = "pass";
  } else if (rms <= -25.0) {
    h3.verdict = "marginal";
  }
  out.push_back(h3);

  HypothesisResult h4{"H4", "Spectral structure of the mix is preserved",
                      "spectral convergence < 0.05",
                      fmt("%.4f", report.quality.spectral_convergence),
                      report.quality.spectral_convergence < 0.05 ? "pass"
                                                                 : "fail"};
  out.push_back(h4);
  return out;
}

}  // namespace

BenchRun run_bench(const StemSet& stems, const AudioBuffer* original_mix,
                   const BenchOptions& options) {
  BenchRun run;
  BenchReport& report = run.report;
  report.baselines = options.baselines;
  report.lossless_label = options.lossless_label;

  const EncodeSession session =
      encode_session(stems, original_mix, options.encode);
  run.snc_bytes = session_to_bytes(session);
  report.snc_bytes = run.snc_bytes.size();
  report.loudness = session.loudness;
  report.duration_s =
      double(stems.length()) / double(stems.sample_rate());

  const SncFile file = demux_bytes(run.snc_bytes);
  report.components = file.component_sizes;

  const DecodedFile decoded = decode_file(file);

  report.quality.stoi = stoi(session.normalized_mix, decoded.reconstruction);
  report.quality.spectral_convergence =
      spectral_convergence(session.normalized_mix, decoded.reconstruction);
  report.quality.snr_db = snr_db(session.normalized_mix, decoded.reconstruction);
  report.quality.residual = session.residual_stats;
  report.quality.sizes = report.components.tracks;
  report.quality.sizes["metadata"] = report.components.attachment;
  report.quality.sizes["container_overhead"] =
      report.components.file - report.components.components_total();
  report.quality.sizes["file"] = report.components.file;

  // The entropy comparison looks at the source material itself, before any
  // normalization or coding: that is what the stem-vs-mix question is about.
  const AudioBuffer mix = original_mix ? *original_mix : mix_sum(stems);
  report.entropy = entropy_comparison(stems, mix);

  report.hypotheses = evaluate_hypotheses(report);
  return run;
}

std::string BenchReport::to_json(bool pretty) const {
  json root;
  root["duration_s"] = json_number(duration_s);
  root["loudness"] = {{"integrated_lufs", json_number(loudness.integrated_lufs)},
                      {"gain_applied_db", json_number(loudness.gain_applied_db)}};

  json sizes = json::array();
  const BenchBaseline* lossless = find_lossless(*this);
  json snc_row;
  snc_row["format"] = "snc";
  snc_row["bytes"] = snc_bytes;
  snc_row["reduction_vs_lossless_pct"] =
      lossless ? json_number(reduction_pct(snc_bytes, lossless->bytes))
               : json(nullptr);
  sizes.push_back(snc_row);
  for (const auto& baseline : baselines) {
    json row;
    row["format"] = baseline.label;
    row["bytes"] = baseline.bytes;
    row["reduction_vs_lossless_pct"] =
        (lossless && lossless != &baseline)
            ? json_number(reduction_pct(baseline.bytes, lossless->bytes))
            : json(nullptr);
    sizes.push_back(row);
  }
  root["size_comparison"] = sizes;
  root["lossless_label"] =
      lossless_label.empty() ? json(nullptr) : json(lossless_label);

  json components_json;
  json tracks;
  for (const auto& [name, bytes] : components.tracks) {
    tracks[name] = bytes;
  }
  components_json["tracks"] = tracks;
  components_json["metadata_bytes"] = components.attachment;
  components_json["container_overhead_bytes"] =
      components.file - components.components_total();
  components_json["file_bytes"] = components.file;
  json percents;
  if (components.file > 0) {
    for (const auto& [name, bytes] : components.tracks) {
      percents[name] = json_number(100.0 * double(bytes) / components.file);
    }
    percents["metadata"] =
        json_number(100.0 * double(components.attachment) / components.file);
  }
  components_json["percent_of_file"] = percents;
  root["components"] = components_json;

  root["quality"] = json::parse(quality_report_json(quality, false));

  json entropy_json;
  json stems_json;
  for (const auto& [kind, bits] : entropy.stem_entropy_bits) {
    json stem;
    stem["entropy_bits"] = json_number(bits);
    stem["weight"] = json_number(entropy.stem_weight.at(kind));
    stems_json[std::string(to_label(kind))] = stem;
  }
  entropy_json["stems"] = stems_json;
  entropy_json["weighted_stem_sum_bits"] =
      json_number(entropy.weighted_stem_sum_bits);
  entropy_json["mix_entropy_bits"] = json_number(entropy.mix_entropy_bits);
  entropy_json["inequality_holds"] = entropy.inequality_holds;
  root["entropy"] = entropy_json;

  json hypotheses_json = json::array();
  for (const auto& h : hypotheses) {
    hypotheses_json.push_back({{"id", h.id},
                               {"description", h.description},
                               {"target", h.target},
                               {"actual", h.actual},
                               {"verdict", h.verdict}});
  }
  root["hypotheses"] = hypotheses_json;

  return pretty ? root.dump(2) + "\n" : root.dump();
}

std::string BenchReport::to_markdown() const {
  std::string md;
  md += "# SNC bench report\n\n";
  md += "Duration " + fmt("%.2f", duration_s) + " s; source mix measured " +
        fmt("%.2f", loudness.integrated_lufs) + " LUFS, normalized by " +
        fmt("%+.2f", loudness.gain_applied_db) + " dB.\n";

  md += "\n## Size comparison\n\n";
  const BenchBaseline* lossless = find_lossless(*this);
  const std::string anchor =
      lossless ? "vs. " + lossless->label : "vs. lossless";
  md += "| Format | Bytes | " + anchor + " |\n|---|---:|---:|\n";
  const auto size_row = [&](const std::string& label, size_t bytes,
                            bool is_anchor) {
    std::string delta = "n/a";
    if (lossless) {
      delta = is_anchor ? "baseline"
                        : fmt("%+.1f%%", -reduction_pct(bytes, lossless->bytes));
    }
    md += "| " + label + " | " + std::to_string(bytes) + " | " + delta + " |\n";
  };
  size_row("snc", snc_bytes, false);
  for (const auto& baseline : baselines) {
    size_row(baseline.label, baseline.bytes, lossless == &baseline);
  }

  md += "\n## Component breakdown\n\n| Component | Bytes | % of file |\n";
  md += "|---|---:|---:|\n";
  const auto component_row = [&](const std::string& name, size_t bytes) {
    const double pct =
        components.file > 0 ? 100.0 * double(bytes) / components.file : 0.0;
    md += "| " + name + " | " + std::to_string(bytes) + " | " +
          fmt("%.1f%%", pct) + " |\n";
  };
  for (const auto& [name, bytes] : components.tracks) {
    component_row(name, bytes);
  }
  component_row("metadata", components.attachment);
  component_row("container overhead",
                components.file - components.components_total());
  component_row("total", components.file);

  md += "\n## Residual\n\n";
  md += "| RMS (dBFS) | Peak (dBFS) | Energy ratio | SNR (dB) |\n";
  md += "|---:|---:|---:|---:|\n";
  md += "| " + fmt("%.2f", quality.residual.rms_db) + " | " +
        fmt("%.2f", quality.residual.peak_db) + " | " +
        fmt("%.2f%%", quality.residual.energy_ratio * 100.0) + " | " +
        fmt("%.2f", quality.residual.snr_db) + " |\n";

  md += "\n## Reconstruction quality\n\n";
  md += "| STOI | Spectral convergence | SNR (dB) |\n|---:|---:|---:|\n";
  md += "| " + fmt("%.4f", quality.stoi) + " | " +
        fmt("%.4f", quality.spectral_convergence) + " | " +
        fmt("%.2f", quality.snr_db) + " |\n";

  md += "\n## Entropy comparison\n\n";
  md += "| Stem | Mean entropy (bits) | Active weight |\n|---|---:|---:|\n";
  for (const auto& [kind, bits] : entropy.stem_entropy_bits) {
    md += "| " + std::string(to_label(kind)) + " | " + fmt("%.4f", bits) +
          " | " + fmt("%.3f", entropy.stem_weight.at(kind)) + " |\n";
  }
  md += "\nWeighted stem sum " + fmt("%.4f", entropy.weighted_stem_sum_bits) +
        " bits vs. mix " + fmt("%.4f", entropy.mix_entropy_bits) +
        " bits; weighted sum < mix: " +
        (entropy.inequality_holds ? "yes" : "no") + ".\n";

  md += "\n## Hypothesis tests\n\n";
  md += "| ID | Hypothesis | Target | Measured | Verdict |\n";
  md += "|---|---|---|---|---|\n";
  for (const auto& h : hypotheses) {
    md += "| " + h.id + " | " + h.description + " | " + h.target + " | " +
          h.actual + " | " + h.verdict + " |\n";
  }
  return md;
}

}  // namespace snc
