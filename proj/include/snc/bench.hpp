#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snc/audio_buffer.hpp"
#include "snc/container.hpp"
#include "snc/loudness.hpp"
#include "snc/metrics.hpp"
#include "snc/pipeline.hpp"

namespace snc {

// An externally produced reference encoding, identified by label with its
// on-disk size. Bench never creates these files; it only measures what it
// is handed, so every percentage in the report comes from real bytes.
struct BenchBaseline {
  std::string label;
  size_t bytes = 0;
};

struct BenchOptions {
  EncodeOptions encode;
  std::vector<BenchBaseline> baselines;
  // Which baseline anchors the size-reduction hypothesis. Empty, or a label
  // that matches no baseline, marks the hypothesis "n/a".
  std::string lossless_label;
};

// One row of the hypothesis table: the stated target, the measured value,
// and a verdict in {"pass", "marginal", "fail", "n/a"}. Verdicts are
// reported, never asserted — a failed hypothesis is a result, not an error.
struct HypothesisResult {
  std::string id;
  std::string description;
  std::string target;
  std::string actual;
  std::string verdict;
};

struct BenchReport {
  double duration_s = 0.0;
  LoudnessResult loudness;
  size_t snc_bytes = 0;
  std::vector<BenchBaseline> baselines;
  std::string lossless_label;  // empty when no lossless anchor was given
  ComponentSizes components;
  QualityReport quality;
  EntropyReport entropy;
  std::vector<HypothesisResult> hypotheses;

  // Deterministic renderings: sorted keys, fixed precision, no timestamps.
  std::string to_json(bool pretty = true) const;
  std::string to_markdown() const;
};

// A bench pass returns the report plus the exact container bytes it
// measured, so callers can persist the artifact without re-encoding.
struct BenchRun {
  BenchReport report;
  std::vector<uint8_t> snc_bytes;
};

// Full encode → decode → measure pass over one set of stems. original_mix
// may be null (the mix is then the plain stem sum). Deterministic: the same
// inputs and backend produce identical container bytes and report text.
BenchRun run_bench(const StemSet& stems, const AudioBuffer* original_mix,
                   const BenchOptions& options = {});

}  // namespace snc
