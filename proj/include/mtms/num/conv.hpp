#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtms/num/tensor.hpp"

namespace mtms::num {

// Causal dilated 1-D convolution weights.
//
// `weight` is stored tap-major as (kernel * in_channels) x out_channels: rows
// [k*Cin, (k+1)*Cin) hold tap k. Tap k reads the input frame
// t - dilation * (kernel - 1 - k), so the last tap is the current frame.
template <typename Scalar>
struct ConvParamsT {
  SeqTensorT<Scalar> weight;
  SeqTensorT<Scalar> bias;  // 1 x out_channels
  int dilation = 1;
  int kernel = 1;

  Eigen::Index in_channels() const { return kernel > 0 ? weight.rows() / kernel : 0; }
  Eigen::Index out_channels() const { return weight.cols(); }

  // Cin x Cout block of tap k.
  auto tap(int k) const { return weight.middleRows(k * in_channels(), in_channels()); }

  // Frames between tap k and the current frame.
  int tap_offset(int k) const { return dilation * (kernel - 1 - k); }
  int history() const { return dilation * (kernel - 1); }

  template <typename NewScalar>
  ConvParamsT<NewScalar> cast() const {
    return {weight.template cast<NewScalar>(), bias.template cast<NewScalar>(), dilation, kernel};
  }
};

using ConvParams = ConvParamsT<double>;

template <typename Scalar>
void validate(const ConvParamsT<Scalar>& p) {
  if (p.kernel < 1) throw InvalidArgument("conv: kernel width must be >= 1");
  if (p.dilation < 1) throw InvalidArgument("conv: dilation must be >= 1");
  if (p.weight.rows() == 0 || p.weight.rows() % p.kernel != 0) {
    throw InvalidArgument("conv: weight rows must be a positive multiple of the kernel width");
  }
  if (p.bias.rows() != 1 || p.bias.cols() != p.weight.cols()) {
    throw InvalidArgument("conv: bias length " + std::to_string(p.bias.cols()) +
                          " does not match out channels " + std::to_string(p.weight.cols()));
  }
  if (!all_finite(p.weight) || !all_finite(p.bias)) throw NumericError("conv: non-finite weights");
}

// One output frame of a causal convolution. `taps[k]` points at the Cin input
// values tap k reads, or is null when that tap falls before frame 0 (zero
// padding). Both the offline and the streaming paths go through here, which is
// what makes them agree bit for bit: each output channel is accumulated in the
// same fixed order regardless of caller.
template <typename Scalar>
void conv_row(const ConvParamsT<Scalar>& p, std::span<const Scalar* const> taps, Scalar* out) {
  const Eigen::Index cin = p.in_channels();
  const Eigen::Index cout = p.out_channels();
  for (Eigen::Index o = 0; o < cout; ++o) out[o] = p.bias(0, o);
  for (int k = 0; k < p.kernel; ++k) {
    const Scalar* x = taps[static_cast<std::size_t>(k)];
    if (x == nullptr) continue;
    for (Eigen::Index i = 0; i < cin; ++i) {
      const Scalar xi = x[i];
      const Scalar* w = p.weight.data() + (k * cin + i) * cout;
      for (Eigen::Index o = 0; o < cout; ++o) out[o] += w[o] * xi;
    }
  }
}

// Output has the same T as `input`; frames before 0 are treated as zeros.
template <typename Scalar>
SeqTensorT<Scalar> conv1d_causal(const SeqTensorT<Scalar>& input, const ConvParamsT<Scalar>& p) {
  validate(p);
  check_sequence(input, "conv1d_causal");
  if (input.cols() != p.in_channels()) {
    throw InvalidArgument("conv1d_causal: input has " + std::to_string(input.cols()) +
                          " channels, kernel expects " + std::to_string(p.in_channels()));
  }
  const Eigen::Index frames = input.rows();
  SeqTensorT<Scalar> out(frames, p.out_channels());
  std::vector<const Scalar*> taps(static_cast<std::size_t>(p.kernel));
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = 0; k < p.kernel; ++k) {
      const Eigen::Index src = t - p.tap_offset(k);
      taps[static_cast<std::size_t>(k)] = src >= 0 ? input.row(src).data() : nullptr;
    }
    conv_row<Scalar>(p, taps, out.row(t).data());
  }
  return out;
}

struct ConvGradients {
  SeqTensor input;
  SeqTensor weight;
  SeqTensor bias;
};

// Gradients of conv1d_causal given the upstream gradient of its output.
// With `want_input == false` the input gradient is left empty.
inline ConvGradients conv1d_causal_backward(const SeqTensor& input, const ConvParams& p,
                                            const SeqTensor& grad_out, bool want_input = true) {
  const Eigen::Index frames = input.rows();
  const Eigen::Index cin = p.in_channels();
  ConvGradients g{want_input ? SeqTensor::Zero(frames, cin) : SeqTensor(),
                  SeqTensor::Zero(p.weight.rows(), p.weight.cols()), grad_out.colwise().sum()};
  for (int k = 0; k < p.kernel; ++k) {
    const Eigen::Index shift = p.tap_offset(k);
    if (shift >= frames) continue;
    const Eigen::Index n = frames - shift;
    g.weight.middleRows(k * cin, cin).noalias() += input.topRows(n).transpose() * grad_out.bottomRows(n);
    if (want_input) g.input.topRows(n).noalias() += grad_out.bottomRows(n) * p.tap(k).transpose();
  }
  return g;
}

}  // namespace mtms::num
