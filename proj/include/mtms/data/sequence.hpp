#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtms/num/tensor.hpp"

namespace mtms::data {

// One video: T x D features with per-frame phase and step labels. Features are
// kept at the 32-bit precision the on-disk format stores.
struct FeatureSequence {
  std::string video_id;
  num::SeqTensorT<float> features;
  std::vector<int> phase_labels;
  std::vector<int> step_labels;
  double fps = 1.0;

  Eigen::Index frames() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  num::SeqTensor features_f64() const { return features.cast<double>(); }

  bool operator==(const FeatureSequence&) const = default;
};

using Dataset = std::vector<FeatureSequence>;

// Checks T >= 1, label lengths, finite features and, when the counts are
// positive, label ranges.
void validate(const FeatureSequence& seq, int num_phases = 0, int num_steps = 0);

// Keeps frames 0, stride, 2*stride, ... and divides fps by stride.
FeatureSequence subsample(const FeatureSequence& seq, int stride);

// Binary ".fseq" layout, little-endian:
//   "FSEQ" | u32 version (1) | u32 T | u32 D | u32 fps_milli |
//   T*D f32 row-major | T u16 phase labels | T u16 step labels
// fps is stored in thousandths of a frame per second.
inline constexpr std::uint32_t kSequenceFormatVersion = 1;

std::vector<std::uint8_t> encode_sequence(const FeatureSequence& seq);
// `video_id` is not part of the byte layout; the caller supplies it.
FeatureSequence decode_sequence(const std::vector<std::uint8_t>& bytes, std::string video_id = {});

void write_sequence(const FeatureSequence& seq, const std::string& path);
// The video id is taken from the file stem.
FeatureSequence read_sequence(const std::string& path);

}  // namespace mtms::data
