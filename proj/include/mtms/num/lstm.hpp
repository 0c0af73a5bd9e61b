#pragma once

#include <cmath>
#include <string>

#include "mtms/num/tensor.hpp"

namespace mtms::num {

// Unidirectional LSTM cell weights. Gate columns are laid out [input, forget,
// cell, output], each `hidden` wide.
template <typename Scalar>
struct LstmParamsT {
  SeqTensorT<Scalar> input_weight;      // Din x 4H
  SeqTensorT<Scalar> recurrent_weight;  // H x 4H
  SeqTensorT<Scalar> bias;              // 1 x 4H

  Eigen::Index hidden() const { return recurrent_weight.rows(); }
  Eigen::Index input_dim() const { return input_weight.rows(); }
};

using LstmParams = LstmParamsT<double>;

template <typename Scalar>
void validate(const LstmParamsT<Scalar>& p) {
  const Eigen::Index h = p.hidden();
  if (h < 1 || p.recurrent_weight.cols() != 4 * h || p.input_weight.cols() != 4 * h ||
      p.bias.rows() != 1 || p.bias.cols() != 4 * h) {
    throw InvalidArgument("lstm: weight shapes inconsistent with hidden size " + std::to_string(h));
  }
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

// Scratch for one recurrence step; `gates` holds post-activation values.
template <typename Scalar>
struct LstmStepState {
  RowVectorT<Scalar> hidden;
  RowVectorT<Scalar> cell;
  RowVectorT<Scalar> gates;

  explicit LstmStepState(Eigen::Index h)
      : hidden(RowVectorT<Scalar>::Zero(h)), cell(RowVectorT<Scalar>::Zero(h)),
        gates(RowVectorT<Scalar>::Zero(4 * h)) {}
};

// Advances `state` by one frame. Shared by the offline and streaming paths.
template <typename Scalar>
void lstm_step(const LstmParamsT<Scalar>& p, const Scalar* x, LstmStepState<Scalar>& state) {
  const Eigen::Index h = p.hidden();
  const Eigen::Index width = 4 * h;
  Scalar* z = state.gates.data();
  for (Eigen::Index j = 0; j < width; ++j) z[j] = p.bias(0, j);
  for (Eigen::Index i = 0; i < p.input_dim(); ++i) {
    const Scalar xi = x[i];
    const Scalar* w = p.input_weight.data() + i * width;
    for (Eigen::Index j = 0; j < width; ++j) z[j] += w[j] * xi;
  }
  for (Eigen::Index i = 0; i < h; ++i) {
    const Scalar hi = state.hidden(i);
    const Scalar* w = p.recurrent_weight.data() + i * width;
    for (Eigen::Index j = 0; j < width; ++j) z[j] += w[j] * hi;
  }
  for (Eigen::Index j = 0; j < h; ++j) {
    const Scalar in = sigmoid(z[j]);
    const Scalar forget = sigmoid(z[h + j]);
    const Scalar cand = std::tanh(z[2 * h + j]);
    const Scalar out = sigmoid(z[3 * h + j]);
    z[j] = in;
    z[h + j] = forget;
    z[2 * h + j] = cand;
    z[3 * h + j] = out;
    state.cell(j) = forget * state.cell(j) + in * cand;
    state.hidden(j) = out * std::tanh(state.cell(j));
  }
}

// Activations retained for back-propagation through time.
struct LstmTrace {
  SeqTensor hidden;  // T x H
  SeqTensor cell;    // T x H
  SeqTensor gates;   // T x 4H, post-activation
};

inline LstmTrace lstm_forward(const SeqTensor& input, const LstmParams& p) {
  validate(p);
  check_sequence(input, "lstm_forward");
  if (input.cols() != p.input_dim()) {
    throw InvalidArgument("lstm_forward: input has " + std::to_string(input.cols()) +
                          " channels, weights expect " + std::to_string(p.input_dim()));
  }
  const Eigen::Index frames = input.rows();
  const Eigen::Index h = p.hidden();
  LstmTrace trace{SeqTensor(frames, h), SeqTensor(frames, h), SeqTensor(frames, 4 * h)};
  LstmStepState<double> state(h);
  for (Eigen::Index t = 0; t < frames; ++t) {
    lstm_step(p, input.row(t).data(), state);
    trace.hidden.row(t) = state.hidden;
    trace.cell.row(t) = state.cell;
    trace.gates.row(t) = state.gates;
  }
  return trace;
}

struct LstmGradients {
  SeqTensor input;
  SeqTensor input_weight;
  SeqTensor recurrent_weight;
  SeqTensor bias;
};

// Back-propagation through time for the whole sequence, given dLoss/dhidden.
inline LstmGradients lstm_backward(const SeqTensor& input, const LstmParams& p,
                                   const LstmTrace& trace, const SeqTensor& grad_hidden,
                                   bool want_input = true) {
  const Eigen::Index frames = input.rows();
  const Eigen::Index h = p.hidden();
  SeqTensor dz(frames, 4 * h);
  RowVector dh_next = RowVector::Zero(h);
  RowVector dc_next = RowVector::Zero(h);
  for (Eigen::Index t = frames - 1; t >= 0; --t) {
    const auto gi = trace.gates.row(t).segment(0, h).array();
    const auto gf = trace.gates.row(t).segment(h, h).array();
    const auto gg = trace.gates.row(t).segment(2 * h, h).array();
    const auto go = trace.gates.row(t).segment(3 * h, h).array();
    const Eigen::ArrayXXd tanh_c = trace.cell.row(t).array().tanh();
    const Eigen::ArrayXXd c_prev =
        t > 0 ? Eigen::ArrayXXd(trace.cell.row(t - 1).array()) : Eigen::ArrayXXd::Zero(1, h);
    const Eigen::ArrayXXd dh = grad_hidden.row(t).array() + dh_next.array();
    const Eigen::ArrayXXd dc = dc_next.array() + dh * go * (1.0 - tanh_c.square());
    dz.row(t).segment(0, h) = (dc * gg * gi * (1.0 - gi)).matrix();
    dz.row(t).segment(h, h) = (dc * c_prev * gf * (1.0 - gf)).matrix();
    dz.row(t).segment(2 * h, h) = (dc * gi * (1.0 - gg.square())).matrix();
    dz.row(t).segment(3 * h, h) = (dh * tanh_c * go * (1.0 - go)).matrix();
    dc_next = (dc * gf).matrix();
    dh_next.noalias() = dz.row(t) * p.recurrent_weight.transpose();
  }
  LstmGradients g;
  if (want_input) g.input.noalias() = dz * p.input_weight.transpose();
  g.input_weight.noalias() = input.transpose() * dz;
  g.recurrent_weight = SeqTensor::Zero(h, 4 * h);
  if (frames > 1) {
    g.recurrent_weight.noalias() = trace.hidden.topRows(frames - 1).transpose() * dz.bottomRows(frames - 1);
  }
  g.bias = dz.colwise().sum();
  return g;
}

}  // namespace mtms::num
