#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "mtms/num/tensor.hpp"

namespace mtms::num {

// Max-subtracted softmax of one row of length n.
template <typename Scalar>
void softmax_row(const Scalar* logits, Eigen::Index n, Scalar* out) {
  Scalar mx = logits[0];
  for (Eigen::Index c = 1; c < n; ++c) mx = std::max(mx, logits[c]);
  Scalar total = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    out[c] = std::exp(logits[c] - mx);
    total += out[c];
  }
  for (Eigen::Index c = 0; c < n; ++c) out[c] /= total;
}

template <typename Scalar>
SeqTensorT<Scalar> softmax_rows(const SeqTensorT<Scalar>& logits) {
  SeqTensorT<Scalar> probs(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    softmax_row<Scalar>(logits.row(t).data(), logits.cols(), probs.row(t).data());
  }
  return probs;
}

// Index of the largest entry; ties resolve to the lowest class id.
template <typename Scalar>
int argmax_row(const Scalar* row, Eigen::Index n) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < n; ++c) {
    if (row[c] > row[best]) best = c;
  }
  return static_cast<int>(best);
}

struct XentResult {
  double loss = 0.0;
  SeqTensor probs;
  SeqTensor grad_logits;
};

// Mean over frames of w[target] * -log softmax(logits)[target]. With no
// weights every class weighs 1.
inline XentResult softmax_xent(const SeqTensor& logits, std::span<const int> targets,
                               std::optional<std::span<const double>> class_weights = std::nullopt) {
  check_sequence(logits, "softmax_xent");
  const Eigen::Index frames = logits.rows();
  const Eigen::Index classes = logits.cols();
  if (static_cast<Eigen::Index>(targets.size()) != frames) {
    throw InvalidArgument("softmax_xent: " + std::to_string(targets.size()) + " targets for " +
                          std::to_string(frames) + " frames");
  }
  if (class_weights && static_cast<Eigen::Index>(class_weights->size()) != classes) {
    throw InvalidArgument("softmax_xent: class weight count does not match class count");
  }
  if (class_weights) {
    for (double w : *class_weights) {
      // Zero is allowed: it marks classes absent from the training frames.
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("softmax_xent: negative class weight");
    }
  }
  XentResult r;
  r.probs = softmax_rows(logits);
  r.grad_logits = r.probs;
  const double inv_t = 1.0 / static_cast<double>(frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const int y = targets[static_cast<std::size_t>(t)];
    if (y < 0 || y >= classes) {
      throw InvalidArgument("softmax_xent: target " + std::to_string(y) + " out of range [0, " +
                            std::to_string(classes) + ")");
    }
    const double w = class_weights ? (*class_weights)[static_cast<std::size_t>(y)] : 1.0;
    // log-sum-exp form keeps -log p finite even when p underflows.
    const double mx = logits.row(t).maxCoeff();
    const double lse = mx + std::log((logits.row(t).array() - mx).exp().sum());
    r.loss += w * (lse - logits(t, y));
    r.grad_logits(t, y) -= 1.0;
    r.grad_logits.row(t) *= w * inv_t;
  }
  r.loss *= inv_t;
  return r;
}

}  // namespace mtms::num
