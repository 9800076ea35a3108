#include "snc/container.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

#include "ebml.hpp"
#include "snc/errors.hpp"

namespace snc {

namespace {

// Matroska element IDs (the subset this container writes and reads).
namespace mkv {
constexpr uint32_t kEbml = 0x1A45DFA3;
constexpr uint32_t kEbmlVersion = 0x4286;
constexpr uint32_t kEbmlReadVersion = 0x42F7;
constexpr uint32_t kEbmlMaxIdLength = 0x42F2;
constexpr uint32_t kEbmlMaxSizeLength = 0x42F3;
constexpr uint32_t kDocType = 0x4282;
constexpr uint32_t kDocTypeVersion = 0x4287;
constexpr uint32_t kDocTypeReadVersion = 0x4285;

constexpr uint32_t kSegment = 0x18538067;
constexpr uint32_t kInfo = 0x1549A966;
constexpr uint32_t kTimestampScale = 0x2AD7B1;
constexpr uint32_t kMuxingApp = 0x4D80;
constexpr uint32_t kWritingApp = 0x5741;
constexpr uint32_t kDuration = 0x4489;

constexpr uint32_t kTracks = 0x1654AE6B;
constexpr uint32_t kTrackEntry = 0xAE;
constexpr uint32_t kTrackNumber = 0xD7;
constexpr uint32_t kTrackUid = 0x73C5;
constexpr uint32_t kTrackType = 0x83;
constexpr uint32_t kFlagLacing = 0x9C;
constexpr uint32_t kName = 0x536E;
constexpr uint32_t kLanguage = 0x22B59C;
constexpr uint32_t kCodecId = 0x86;
constexpr uint32_t kCodecPrivate = 0x63A2;
constexpr uint32_t kCodecDelay = 0x56AA;
constexpr uint32_t kSeekPreRoll = 0x56BB;
constexpr uint32_t kAudio = 0xE1;
constexpr uint32_t kSamplingFrequency = 0xB5;
constexpr uint32_t kChannels = 0x9F;

constexpr uint32_t kAttachments = 0x1941A469;
constexpr uint32_t kAttachedFile = 0x61A7;
constexpr uint32_t kFileName = 0x466E;
constexpr uint32_t kFileMimeType = 0x4660;
constexpr uint32_t kFileData = 0x465C;
constexpr uint32_t kFileUid = 0x46AE;

constexpr uint32_t kCluster = 0x1F43B675;
constexpr uint32_t kClusterTimestamp = 0xE7;
constexpr uint32_t kSimpleBlock = 0xA3;
constexpr uint32_t kBlockGroup = 0xA0;
constexpr uint32_t kBlock = 0xA1;
constexpr uint32_t kDiscardPadding = 0x75A2;

constexpr uint64_t kTimestampScaleNs = 1000000;  // 1 ms ticks
constexpr uint64_t kSeekPreRollNs = 80000000;    // 80 ms, standard for opus
}  // namespace mkv

constexpr char kAttachmentName[] = "snc_meta.json";
constexpr char kOpusCodecId[] = "A_OPUS";
constexpr char kResidualName[] = "residual";

int64_t samples_to_ns(uint64_t samples, int rate) {
  return std::llround(static_cast<double>(samples) * 1e9 / rate);
}

uint64_t ns_to_samples(int64_t ns, int rate) {
  return static_cast<uint64_t>(std::llround(static_cast<double>(ns) * rate / 1e9));
}

// RFC 7845 identification header, mapping family 0 (mono/stereo).
std::vector<uint8_t> opus_head(const EncodedStream& s) {
  std::vector<uint8_t> h;
  h.reserve(19);
  const char magic[] = "OpusHead";
  h.insert(h.end(), magic, magic + 8);
  h.push_back(1);  // header version
  h.push_back(static_cast<uint8_t>(s.channels));
  const auto preskip = static_cast<uint16_t>(s.preskip_samples);
  h.push_back(static_cast<uint8_t>(preskip & 0xFF));
  h.push_back(static_cast<uint8_t>(preskip >> 8));
  const auto rate = static_cast<uint32_t>(s.sample_rate);
  for (int i = 0; i < 4; ++i) h.push_back(static_cast<uint8_t>(rate >> (8 * i)));
  h.push_back(0);  // output gain, Q7.8 dB
  h.push_back(0);
  h.push_back(0);  // channel mapping family
  return h;
}

struct OpusHeadFields {
  int channels = 0;
  int preskip = 0;
  int input_rate = 0;
};

OpusHeadFields parse_opus_head(const ebml::Element& e) {
  if (e.size < 19 || std::memcmp(e.payload, "OpusHead", 8) != 0 ||
      e.payload[8] != 1) {
    throw Error(ErrorCode::Parse, "track private data is not an opus header",
                e.payload_offset);
  }
  OpusHeadFields f;
  f.channels = e.payload[9];
  f.preskip = e.payload[10] | e.payload[11] << 8;
  f.input_rate = static_cast<int>(
      static_cast<uint32_t>(e.payload[12]) | static_cast<uint32_t>(e.payload[13]) << 8 |
      static_cast<uint32_t>(e.payload[14]) << 16 |
      static_cast<uint32_t>(e.payload[15]) << 24);
  return f;
}

struct MuxTrack {
  int number = 0;
  std::string name;
  const EncodedStream* stream = nullptr;
};

void check_stream_muxable(const EncodedStream& s, const std::string& name) {
  if (s.codec_id != "opus") {
    throw Error(ErrorCode::Unsupported,
                "no container codec mapping for backend '" + s.codec_id +
                    "' (track " + name + ")");
  }
  if (s.channels < 1 || s.channels > 2) {
    throw Error(ErrorCode::Argument,
                "track " + name + ": only mono and stereo are muxable");
  }
  if (s.sample_rate <= 0) {
    throw Error(ErrorCode::Argument, "track " + name + ": bad sample rate");
  }
  uint64_t total = 0;
  for (const auto& p : s.packets) {
    if (p.samples <= 0) {
      throw Error(ErrorCode::Argument,
                  "track " + name + ": packet without a sample count");
    }
    total += static_cast<uint64_t>(p.samples);
  }
  if (!s.packets.empty() &&
      total < static_cast<uint64_t>(s.preskip_samples) + s.original_length) {
    throw Error(ErrorCode::Argument,
                "track " + name + ": packets cover less than preskip + length");
  }
}

std::vector<uint8_t> ebml_header() {
  ebml::Writer h;
  h.element_uint(mkv::kEbmlVersion, 1);
  h.element_uint(mkv::kEbmlReadVersion, 1);
  h.element_uint(mkv::kEbmlMaxIdLength, 4);
  h.element_uint(mkv::kEbmlMaxSizeLength, 8);
  h.element_string(mkv::kDocType, "matroska");
  h.element_uint(mkv::kDocTypeVersion, 4);
  h.element_uint(mkv::kDocTypeReadVersion, 2);
  ebml::Writer out;
  out.element_master(mkv::kEbml, h.bytes());
  return out.take();
}

std::vector<uint8_t> track_entry(const MuxTrack& t) {
  const EncodedStream& s = *t.stream;
  ebml::Writer e;
  e.element_uint(mkv::kTrackNumber, static_cast<uint64_t>(t.number));
  e.element_uint(mkv::kTrackUid, static_cast<uint64_t>(t.number));
  e.element_uint(mkv::kTrackType, 2);  // audio
  e.element_uint(mkv::kFlagLacing, 0);
  e.element_string(mkv::kName, t.name);
  e.element_string(mkv::kLanguage, "und");
  e.element_string(mkv::kCodecId, kOpusCodecId);
  const auto head = opus_head(s);
  e.element_binary(mkv::kCodecPrivate, head.data(), head.size());
  e.element_uint(mkv::kCodecDelay, static_cast<uint64_t>(samples_to_ns(
                                       s.preskip_samples, s.sample_rate)));
  e.element_uint(mkv::kSeekPreRoll, mkv::kSeekPreRollNs);
  ebml::Writer audio;
  audio.element_float(mkv::kSamplingFrequency, s.sample_rate);
  audio.element_uint(mkv::kChannels, static_cast<uint64_t>(s.channels));
  e.element_master(mkv::kAudio, audio.bytes());
  ebml::Writer out;
  out.element_master(mkv::kTrackEntry, e.bytes());
  return out.take();
}

// One packet scheduled for a cluster.
struct BlockRef {
  int64_t pts_ms = 0;
  int track = 0;
  const EncodedPacket* packet = nullptr;
  int64_t discard_ns = 0;  // > 0 only on a track's final packet
};

std::vector<uint8_t> block_frame(int track, int16_t rel_ts, uint8_t flags,
                                 const std::vector<uint8_t>& packet) {
  std::vector<uint8_t> b;
  b.reserve(packet.size() + 4);
  ebml::append_vint(b, static_cast<uint64_t>(track));
  b.push_back(static_cast<uint8_t>(static_cast<uint16_t>(rel_ts) >> 8));
  b.push_back(static_cast<uint8_t>(static_cast<uint16_t>(rel_ts) & 0xFF));
  b.push_back(flags);
  b.insert(b.end(), packet.begin(), packet.end());
  return b;
}

}  // namespace

size_t ComponentSizes::components_total() const {
  size_t total = attachment;
  for (const auto& [name, bytes] : tracks) total += bytes;
  return total;
}

std::vector<uint8_t> mux_to_bytes(const std::map<StemKind, EncodedStream>& stems,
                                  const EncodedStream& residual,
                                  const SncMetadata& metadata) {
  const auto violations = validate_metadata(metadata);
  if (!violations.empty()) {
    throw Error(ErrorCode::Schema,
                "metadata does not validate: " + violations.front().path + ": " +
                    violations.front().message + " (" +
                    std::to_string(violations.size()) + " violation(s))");
  }

  // The descriptor list and the stream set must agree exactly, and each
  // descriptor's track index must equal the ordinal position its stem gets.
  std::vector<MuxTrack> tracks;
  for (StemKind kind : kAllStemKinds) {
    const auto it = stems.find(kind);
    if (it == stems.end()) continue;
    MuxTrack t;
    t.number = static_cast<int>(tracks.size()) + 1;
    t.name = std::string(to_label(kind));
    t.stream = &it->second;
    tracks.push_back(t);
  }
  if (tracks.size() != stems.size()) {
    throw Error(ErrorCode::Argument, "duplicate stem kinds in stream map");
  }
  if (metadata.stems.size() != tracks.size()) {
    throw Error(ErrorCode::Schema,
                "metadata describes " + std::to_string(metadata.stems.size()) +
                    " stems, got " + std::to_string(tracks.size()) + " streams");
  }
  for (const auto& d : metadata.stems) {
    const auto it = std::find_if(tracks.begin(), tracks.end(),
                                 [&](const MuxTrack& t) { return t.name == d.name; });
    if (it == tracks.end()) {
      throw Error(ErrorCode::Schema,
                  "metadata describes stem '" + d.name + "' but no such stream");
    }
    if (it->number != d.track) {
      throw Error(ErrorCode::Schema,
                  "metadata puts '" + d.name + "' on track " +
                      std::to_string(d.track) + " but ordinal order assigns " +
                      std::to_string(it->number));
    }
  }
  MuxTrack res;
  res.number = static_cast<int>(tracks.size()) + 1;
  res.name = kResidualName;
  res.stream = &residual;
  tracks.push_back(res);
  for (const auto& t : tracks) check_stream_muxable(*t.stream, t.name);

  // Segment children: Info, Tracks, Attachments, then 1 s clusters.
  ebml::Writer info;
  info.element_uint(mkv::kTimestampScale, mkv::kTimestampScaleNs);
  info.element_string(mkv::kMuxingApp, "snc");
  info.element_string(mkv::kWritingApp, "snc");
  double duration_ms = 0.0;
  for (const auto& t : tracks) {
    duration_ms = std::max(duration_ms, 1e3 * static_cast<double>(t.stream->original_length) /
                                            t.stream->sample_rate);
  }
  info.element_float(mkv::kDuration, duration_ms);

  ebml::Writer track_list;
  for (const auto& t : tracks) {
    const auto entry = track_entry(t);
    track_list.raw_bytes(entry.data(), entry.size());
  }

  const std::string meta_json = metadata_to_json(metadata);
  ebml::Writer attached;
  attached.element_string(mkv::kFileName, kAttachmentName);
  attached.element_string(mkv::kFileMimeType, "application/json");
  attached.element_binary(mkv::kFileData,
                          reinterpret_cast<const uint8_t*>(meta_json.data()),
                          meta_json.size());
  attached.element_uint(mkv::kFileUid, 1);
  ebml::Writer attachments;
  attachments.element_master(mkv::kAttachedFile, attached.bytes());

  // Schedule every packet, then group into clusters by wall-clock second.
  std::vector<BlockRef> refs;
  for (const auto& t : tracks) {
    const EncodedStream& s = *t.stream;
    uint64_t pts_samples = 0;
    uint64_t covered = 0;
    for (const auto& p : s.packets) covered += static_cast<uint64_t>(p.samples);
    const uint64_t discard =
        covered - std::min(covered, static_cast<uint64_t>(s.preskip_samples) +
                                        s.original_length);
    for (size_t i = 0; i < s.packets.size(); ++i) {
      BlockRef r;
      r.pts_ms = std::llround(1e3 * static_cast<double>(pts_samples) / s.sample_rate);
      r.track = t.number;
      r.packet = &s.packets[i];
      if (i + 1 == s.packets.size() && discard > 0) {
        r.discard_ns = samples_to_ns(discard, s.sample_rate);
      }
      refs.push_back(r);
      pts_samples += static_cast<uint64_t>(s.packets[i].samples);
    }
  }
  std::sort(refs.begin(), refs.end(), [](const BlockRef& a, const BlockRef& b) {
    return a.pts_ms != b.pts_ms ? a.pts_ms < b.pts_ms : a.track < b.track;
  });

  ebml::Writer segment;
  segment.element_master(mkv::kInfo, info.bytes());
  segment.element_master(mkv::kTracks, track_list.bytes());
  segment.element_master(mkv::kAttachments, attachments.bytes());

  size_t i = 0;
  while (i < refs.size()) {
    const int64_t cluster_ms = refs[i].pts_ms / 1000 * 1000;
    ebml::Writer cluster;
    cluster.element_uint(mkv::kClusterTimestamp, static_cast<uint64_t>(cluster_ms));
    for (; i < refs.size() && refs[i].pts_ms < cluster_ms + 1000; ++i) {
      const BlockRef& r = refs[i];
      const auto rel = static_cast<int16_t>(r.pts_ms - cluster_ms);
      if (r.discard_ns == 0) {
        const auto frame = block_frame(r.track, rel, 0x80, r.packet->bytes);
        cluster.element_binary(mkv::kSimpleBlock, frame.data(), frame.size());
      } else {
        const auto frame = block_frame(r.track, rel, 0x00, r.packet->bytes);
        ebml::Writer group;
        group.element_binary(mkv::kBlock, frame.data(), frame.size());
        group.element_sint(mkv::kDiscardPadding, r.discard_ns);
        cluster.element_master(mkv::kBlockGroup, group.bytes());
      }
    }
    segment.element_master(mkv::kCluster, cluster.bytes());
  }

  std::vector<uint8_t> out = ebml_header();
  ebml::Writer file;
  file.element_master(mkv::kSegment, segment.bytes());
  const auto& seg = file.bytes();
  out.insert(out.end(), seg.begin(), seg.end());
  return out;
}

size_t mux(const std::map<StemKind, EncodedStream>& stems,
           const EncodedStream& residual, const SncMetadata& metadata,
           const std::string& path) {
  const auto bytes = mux_to_bytes(stems, residual, metadata);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  }
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  f.flush();
  if (!f) {
    throw Error(ErrorCode::Io, "write failed on " + path);
  }
  return bytes.size();
}

namespace {

struct ParsedTrack {
  int number = 0;
  std::string name;
  std::string codec_id;
  OpusHeadFields head;
  double sampling_hz = 0.0;
  int audio_channels = 0;
  bool have_head = false;
  std::vector<EncodedPacket> packets;
  int64_t discard_ns = 0;
};

// Block frame header: track VINT, 2-byte relative timestamp, flags.
struct BlockHeader {
  uint64_t track = 0;
  size_t data_begin = 0;  // offset of the frame payload within the block
};

BlockHeader parse_block_header(const ebml::Element& e) {
  if (e.size < 4) {
    throw Error(ErrorCode::Parse, "block too short", e.payload_offset);
  }
  const uint8_t b0 = e.payload[0];
  if (b0 == 0) {
    throw Error(ErrorCode::Parse, "bad track number in block", e.payload_offset);
  }
  const int len = std::countl_zero(b0) + 1;
  if (static_cast<uint64_t>(len) + 3 > e.size) {
    throw Error(ErrorCode::Parse, "block too short", e.payload_offset);
  }
  BlockHeader h;
  h.track = b0 & (0xFFu >> len);
  for (int i = 1; i < len; ++i) h.track = h.track << 8 | e.payload[i];
  const uint8_t flags = e.payload[len + 2];
  if ((flags & 0x06) != 0) {
    throw Error(ErrorCode::Parse, "laced blocks are not supported",
                e.payload_offset);
  }
  h.data_begin = static_cast<size_t>(len) + 3;
  return h;
}

void read_track_entry(const ebml::Element& entry, std::vector<ParsedTrack>& out) {
  ParsedTrack t;
  ebml::Reader r = ebml::sub_reader(entry);
  ebml::Element e;
  while (r.next(e)) {
    switch (e.id) {
      case mkv::kTrackNumber:
        t.number = static_cast<int>(ebml::uint_value(e));
        break;
      case mkv::kName:
        t.name = ebml::string_value(e);
        break;
      case mkv::kCodecId:
        t.codec_id = ebml::string_value(e);
        break;
      case mkv::kCodecPrivate:
        t.head = parse_opus_head(e);
        t.have_head = true;
        break;
      case mkv::kAudio: {
        ebml::Reader ar = ebml::sub_reader(e);
        ebml::Element ae;
        while (ar.next(ae)) {
          if (ae.id == mkv::kSamplingFrequency) {
            t.sampling_hz = ebml::float_value(ae);
          } else if (ae.id == mkv::kChannels) {
            t.audio_channels = static_cast<int>(ebml::uint_value(ae));
          }
        }
        break;
      }
      default:
        break;  // tolerate elements we do not use
    }
  }
  if (t.number <= 0) {
    throw Error(ErrorCode::Parse, "track entry without a track number",
                entry.payload_offset);
  }
  out.push_back(std::move(t));
}

}  // namespace

SncFile demux_bytes(const std::vector<uint8_t>& bytes) {
  static const uint8_t kMagic[4] = {0x1A, 0x45, 0xDF, 0xA3};
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::NotSnc, "not a Matroska file (bad magic)");
  }

  ebml::Reader top(bytes.data(), bytes.size());
  ebml::Element e;

  // EBML header: the doctype must be matroska.
  if (!top.next(e) || e.id != mkv::kEbml) {
    throw Error(ErrorCode::Parse, "missing EBML header", 0);
  }
  {
    ebml::Reader h = ebml::sub_reader(e);
    ebml::Element he;
    std::string doctype = "matroska";  // per spec, absent means matroska
    while (h.next(he)) {
      if (he.id == mkv::kDocType) doctype = ebml::string_value(he);
    }
    if (doctype != "matroska" && doctype != "webm") {
      throw Error(ErrorCode::NotSnc, "doctype '" + doctype + "' is not matroska");
    }
  }

  if (!top.next(e) || e.id != mkv::kSegment) {
    throw Error(ErrorCode::Parse, "missing segment", top.offset());
  }

  std::vector<ParsedTrack> tracks;
  std::optional<std::string> meta_json;
  uint64_t timestamp_scale = mkv::kTimestampScaleNs;
  double duration_ticks = 0.0;

  ebml::Reader seg = ebml::sub_reader(e);
  ebml::Element se;
  while (seg.next(se)) {
    switch (se.id) {
      case mkv::kInfo: {
        ebml::Reader r = ebml::sub_reader(se);
        ebml::Element ie;
        while (r.next(ie)) {
          if (ie.id == mkv::kTimestampScale) {
            timestamp_scale = ebml::uint_value(ie);
          } else if (ie.id == mkv::kDuration) {
            duration_ticks = ebml::float_value(ie);
          }
        }
        break;
      }
      case mkv::kTracks: {
        ebml::Reader r = ebml::sub_reader(se);
        ebml::Element te;
        while (r.next(te)) {
          if (te.id == mkv::kTrackEntry) read_track_entry(te, tracks);
        }
        break;
      }
      case mkv::kAttachments: {
        ebml::Reader r = ebml::sub_reader(se);
        ebml::Element ae;
        while (r.next(ae)) {
          if (ae.id != mkv::kAttachedFile) continue;
          ebml::Reader fr = ebml::sub_reader(ae);
          ebml::Element fe;
          std::string name;
          std::string data;
          while (fr.next(fe)) {
            if (fe.id == mkv::kFileName) name = ebml::string_value(fe);
            if (fe.id == mkv::kFileData) {
              data.assign(reinterpret_cast<const char*>(fe.payload),
                          static_cast<size_t>(fe.size));
            }
          }
          if (name == kAttachmentName) meta_json = std::move(data);
        }
        break;
      }
      case mkv::kCluster: {
        ebml::Reader r = ebml::sub_reader(se);
        ebml::Element ce;
        while (r.next(ce)) {
          const bool simple = ce.id == mkv::kSimpleBlock;
          const bool group = ce.id == mkv::kBlockGroup;
          if (!simple && !group) continue;

          ebml::Element block = ce;
          int64_t discard_ns = 0;
          if (group) {
            ebml::Reader gr = ebml::sub_reader(ce);
            ebml::Element ge;
            bool have_block = false;
            while (gr.next(ge)) {
              if (ge.id == mkv::kBlock) {
                block = ge;
                have_block = true;
              } else if (ge.id == mkv::kDiscardPadding) {
                discard_ns = ebml::sint_value(ge);
              }
            }
            if (!have_block) {
              throw Error(ErrorCode::Parse, "block group without a block",
                          ce.payload_offset);
            }
          }

          const BlockHeader bh = parse_block_header(block);
          auto it = std::find_if(
              tracks.begin(), tracks.end(),
              [&](const ParsedTrack& t) { return t.number == static_cast<int>(bh.track); });
          if (it == tracks.end()) {
            throw Error(ErrorCode::Parse,
                        "block references unknown track " + std::to_string(bh.track),
                        block.payload_offset);
          }
          EncodedPacket p;
          p.bytes.assign(block.payload + bh.data_begin, block.payload + block.size);
          it->packets.push_back(std::move(p));
          if (discard_ns > 0) it->discard_ns = discard_ns;
        }
        break;
      }
      default:
        break;
    }
  }

  if (tracks.empty()) {
    throw Error(ErrorCode::Parse, "no tracks", 0);
  }
  if (!meta_json) {
    throw Error(ErrorCode::NotSnc,
                "no " + std::string(kAttachmentName) + " attachment");
  }

  SncFile out;
  out.metadata_json = *meta_json;
  out.metadata = metadata_from_json(out.metadata_json);
  out.violations = validate_metadata(out.metadata);
  out.duration_s = duration_ticks * static_cast<double>(timestamp_scale) / 1e9;
  out.component_sizes.attachment = meta_json->size();
  out.component_sizes.file = bytes.size();

  std::sort(tracks.begin(), tracks.end(),
            [](const ParsedTrack& a, const ParsedTrack& b) { return a.number < b.number; });

  const LossyCodec& opus = codec_backend("opus");
  bool have_residual = false;
  for (auto& t : tracks) {
    if (t.codec_id != kOpusCodecId) {
      throw Error(ErrorCode::Schema, "track " + std::to_string(t.number) +
                                         " codec '" + t.codec_id +
                                         "' is not " + kOpusCodecId);
    }
    if (!t.have_head) {
      throw Error(ErrorCode::Schema,
                  "track " + std::to_string(t.number) + " has no opus header");
    }
    const bool is_residual = t.name == kResidualName;
    const auto kind = stem_from_label(t.name);
    if (!is_residual && !kind) {
      throw Error(ErrorCode::Schema,
                  "unknown track name '" + t.name + "' on track " +
                      std::to_string(t.number));
    }
    if (t.audio_channels != 0 && t.audio_channels != t.head.channels) {
      throw Error(ErrorCode::Schema,
                  "track " + std::to_string(t.number) +
                      ": audio element and opus header disagree on channels");
    }

    EncodedStream s;
    s.codec_id = "opus";
    s.sample_rate = t.sampling_hz > 0 ? static_cast<int>(std::llround(t.sampling_hz))
                                      : t.head.input_rate;
    s.channels = t.head.channels;
    s.preskip_samples = t.head.preskip;

    uint64_t covered = 0;
    for (auto& p : t.packets) {
      p.samples = opus.packet_samples(p.bytes, s.sample_rate);
      covered += static_cast<uint64_t>(p.samples);
    }
    const uint64_t discard = ns_to_samples(t.discard_ns, s.sample_rate);
    const uint64_t trim = static_cast<uint64_t>(s.preskip_samples) + discard;
    if (!t.packets.empty() && covered < trim) {
      throw Error(ErrorCode::Parse,
                  "track " + std::to_string(t.number) +
                      ": packets cover less than preskip + padding",
                  0);
    }
    s.original_length = t.packets.empty() ? 0 : covered - trim;
    s.packets = std::move(t.packets);

    // Nominal rates for stems live in their descriptors; the residual's is
    // not stored, so it stays 0 and callers report the measured rate.
    if (is_residual) {
      if (have_residual) {
        throw Error(ErrorCode::Schema, "more than one residual track");
      }
      have_residual = true;
      out.residual_stream = std::move(s);
      if (out.metadata.residual_track != t.number) {
        throw Error(ErrorCode::Schema,
                    "metadata residual_track " +
                        std::to_string(out.metadata.residual_track) +
                        " but residual is track " + std::to_string(t.number));
      }
    } else {
      if (out.streams.count(*kind)) {
        throw Error(ErrorCode::Schema, "duplicate track name '" + t.name + "'");
      }
      const auto d = std::find_if(
          out.metadata.stems.begin(), out.metadata.stems.end(),
          [&](const StemDescriptor& sd) { return sd.name == t.name; });
      if (d == out.metadata.stems.end()) {
        throw Error(ErrorCode::Schema,
                    "track '" + t.name + "' has no metadata descriptor");
      }
      if (d->track != t.number) {
        throw Error(ErrorCode::Schema,
                    "metadata puts '" + t.name + "' on track " +
                        std::to_string(d->track) + " but found it on " +
                        std::to_string(t.number));
      }
      s.nominal_bitrate_kbps = d->bitrate_kbps;
      out.streams.emplace(*kind, std::move(s));
    }
    out.component_sizes.tracks[t.name] =
        is_residual ? out.residual_stream.payload_bytes()
                    : out.streams.at(*kind).payload_bytes();
  }
  if (!have_residual) {
    throw Error(ErrorCode::Schema, "no residual track");
  }
  if (out.streams.size() != out.metadata.stems.size()) {
    throw Error(ErrorCode::Schema,
                "metadata describes " + std::to_string(out.metadata.stems.size()) +
                    " stems but the file has " + std::to_string(out.streams.size()));
  }
  return out;
}

SncFile demux(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error(ErrorCode::Io, "cannot open " + path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  if (f.bad()) {
    throw Error(ErrorCode::Io, "read failed on " + path);
  }
  return demux_bytes(bytes);
}

}  // namespace snc
