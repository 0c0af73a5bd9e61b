#pragma once

#include <optional>

#include "mtms/num/conv.hpp"
#include "mtms/num/random.hpp"

namespace mtms::num {

// Residual layer: x + dropout(pointwise(relu(dilated(x)))). `dilated` has
// kernel 3 in the default models; `pointwise` has kernel 1.
struct ResidualBlockParams {
  ConvParams dilated;
  ConvParams pointwise;
};

// Binary keep-mask for inverted dropout. Kept units are scaled by `scale`
// (1 / (1 - rate)).
struct DropoutMask {
  Mat keep;
  double scale = 1.0;
};

inline DropoutMask sample_dropout_mask(Eigen::Index frames, Eigen::Index channels, double rate,
                                       Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1)");
  DropoutMask m{Mat(frames, channels), 1.0 / (1.0 - rate)};
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index c = 0; c < channels; ++c) m.keep(t, c) = rng.bernoulli(rate) ? 0.0 : 1.0;
  return m;
}

inline SeqTensor dilated_residual_block(const SeqTensor& input, const ResidualBlockParams& block,
                                        const std::optional<DropoutMask>& dropout = std::nullopt) {
  const Eigen::Index width = input.cols();
  if (block.dilated.in_channels() != width || block.pointwise.out_channels() != width) {
    throw InvalidArgument("dilated_residual_block: block width does not match input channels");
  }
  SeqTensor branch = conv1d_causal(input, block.dilated).unaryExpr(&relu<double>);
  branch = conv1d_causal(branch, block.pointwise);
  if (dropout) {
    if (dropout->keep.rows() != input.rows() || dropout->keep.cols() != width) {
      throw InvalidArgument("dilated_residual_block: dropout mask shape mismatch");
    }
    branch = branch.cwiseProduct(dropout->keep * dropout->scale).eval();
  }
  return input + branch;
}

}  // namespace mtms::num
