#include "mtms/data/sequence.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "mtms/data/bytes.hpp"

namespace mtms::data {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'E', 'Q'};

void check_labels(const std::vector<int>& labels, int count, const char* what) {
  for (int y : labels) {
    if (y < 0 || (count > 0 && y >= count)) {
      throw InvalidArgument(std::string("sequence: ") + what + " label " + std::to_string(y) + " out of range");
    }
  }
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

void validate(const FeatureSequence& seq, int num_phases, int num_steps) {
  num::check_sequence(seq.features, "sequence features");
  const auto t = static_cast<std::size_t>(seq.frames());
  if (seq.phase_labels.size() != t || seq.step_labels.size() != t) {
    throw InvalidArgument("sequence " + seq.video_id + ": label arrays must have T entries");
  }
  check_labels(seq.phase_labels, num_phases, "phase");
  check_labels(seq.step_labels, num_steps, "step");
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) throw InvalidArgument("sequence: fps must be positive");
}

FeatureSequence subsample(const FeatureSequence& seq, int stride) {
  if (stride < 1) throw InvalidArgument("subsample: stride must be >= 1, got " + std::to_string(stride));
  const Eigen::Index kept = (seq.frames() + stride - 1) / stride;
  FeatureSequence out;
  out.video_id = seq.video_id;
  out.features.resize(kept, seq.dim());
  out.fps = seq.fps / stride;
  for (Eigen::Index i = 0; i < kept; ++i) {
    const Eigen::Index src = i * stride;
    out.features.row(i) = seq.features.row(src);
    out.phase_labels.push_back(seq.phase_labels[static_cast<std::size_t>(src)]);
    out.step_labels.push_back(seq.step_labels[static_cast<std::size_t>(src)]);
  }
  return out;
}

std::vector<std::uint8_t> encode_sequence(const FeatureSequence& seq) {
  validate(seq);
  for (std::size_t i = 0; i < seq.phase_labels.size(); ++i) {
    if (seq.phase_labels[i] > std::numeric_limits<std::uint16_t>::max() ||
        seq.step_labels[i] > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("sequence: labels must fit in 16 bits");
    }
  }
  const double milli = std::round(seq.fps * 1000.0);
  if (milli < 1.0 || milli > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("sequence: fps not representable in thousandths");
  }
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kSequenceFormatVersion);
  w.u32(static_cast<std::uint32_t>(seq.frames()));
  w.u32(static_cast<std::uint32_t>(seq.dim()));
  w.u32(static_cast<std::uint32_t>(milli));
  for (Eigen::Index t = 0; t < seq.frames(); ++t)
    for (Eigen::Index d = 0; d < seq.dim(); ++d) w.f32(seq.features(t, d));
  for (int y : seq.phase_labels) w.u16(static_cast<std::uint16_t>(y));
  for (int y : seq.step_labels) w.u16(static_cast<std::uint16_t>(y));
  return std::move(w.buffer());
}

FeatureSequence decode_sequence(const std::vector<std::uint8_t>& bytes, std::string video_id) {
  ByteReader r(bytes);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad magic, expected FSEQ", 0);
  const std::uint32_t version = r.u32("version");
  if (version != kSequenceFormatVersion) {
    throw ParseError("unsupported sequence version " + std::to_string(version), 4);
  }
  const std::uint32_t frames = r.u32("frame count");
  const std::uint32_t dim = r.u32("feature dimension");
  const std::size_t header_end = r.offset();
  const std::uint32_t fps_milli = r.u32("fps");
  if (frames == 0 || dim == 0) throw ParseError("empty sequence", header_end - 8);
  if (fps_milli == 0) throw ParseError("zero fps", header_end);
  const std::uint64_t body = static_cast<std::uint64_t>(frames) * dim * 4 + static_cast<std::uint64_t>(frames) * 4;
  if (r.remaining() < body) throw ParseError("truncated sequence body", bytes.size());
  if (r.remaining() > body) throw ParseError("trailing bytes after sequence body", r.offset() + body);

  FeatureSequence seq;
  seq.video_id = std::move(video_id);
  seq.fps = fps_milli / 1000.0;
  seq.features.resize(frames, dim);
  for (std::uint32_t t = 0; t < frames; ++t) {
    for (std::uint32_t d = 0; d < dim; ++d) {
      const std::size_t at = r.offset();
      const float v = r.f32("features");
      if (!std::isfinite(v)) throw ParseError("non-finite feature value", at);
      seq.features(t, d) = v;
    }
  }
  seq.phase_labels.resize(frames);
  seq.step_labels.resize(frames);
  for (auto& y : seq.phase_labels) y = r.u16("phase labels");
  for (auto& y : seq.step_labels) y = r.u16("step labels");
  return seq;
}

void write_sequence(const FeatureSequence& seq, const std::string& path) {
  write_file(path, encode_sequence(seq));
}

FeatureSequence read_sequence(const std::string& path) {
  return decode_sequence(read_file(path), std::filesystem::path(path).stem().string());
}

}  // namespace mtms::data
