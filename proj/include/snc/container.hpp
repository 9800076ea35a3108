#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "snc/codec.hpp"
#include "snc/metadata.hpp"

namespace snc {

// Byte accounting for the bench table: per-track payload bytes (keyed by
// track name), the metadata attachment, and the whole file. Whatever the
// components do not cover is container overhead.
struct ComponentSizes {
  std::map<std::string, size_t> tracks;
  size_t attachment = 0;
  size_t file = 0;

  size_t components_total() const;
};

// A demuxed SNC file. Violations are carried as data: a file whose
// metadata breaks a range invariant still demuxes (inspect reports the
// problems), only mux refuses to produce one.
struct SncFile {
  std::map<StemKind, EncodedStream> streams;
  EncodedStream residual_stream;
  SncMetadata metadata;
  std::string metadata_json;  // exact attachment bytes
  std::vector<Violation> violations;
  ComponentSizes component_sizes;
  double duration_s = 0.0;
};

// Serializes stems + residual + metadata as Matroska: audio tracks in
// StemKind ordinal order then the residual, each named by its stem label,
// metadata attached as snc_meta.json. Identical input yields identical
// bytes. Metadata must validate cleanly and describe exactly the streams
// passed in (schema error otherwise).
std::vector<uint8_t> mux_to_bytes(const std::map<StemKind, EncodedStream>& stems,
                                  const EncodedStream& residual,
                                  const SncMetadata& metadata);

// mux_to_bytes + write to path. Returns bytes written.
size_t mux(const std::map<StemKind, EncodedStream>& stems,
           const EncodedStream& residual, const SncMetadata& metadata,
           const std::string& path);

SncFile demux_bytes(const std::vector<uint8_t>& bytes);
SncFile demux(const std::string& path);

}  // namespace snc
