#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "mtms/num/errors.hpp"

namespace mtms::num {

// Frames are rows, channels are columns. Row-major so a frame is contiguous,
// which is what the streaming kernels and the on-disk layout both want.
template <typename Scalar>
using SeqTensorT =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVectorT = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using SeqTensor = SeqTensorT<double>;
using Mat = SeqTensorT<double>;
using RowVector = RowVectorT<double>;

// Scalar ReLU shared by every path so that zero signs agree everywhere.
template <typename Scalar>
Scalar relu(Scalar v) {
  return v > Scalar(0) ? v : Scalar(0);
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

// Enforces the sequence invariants: at least one frame, at least one channel,
// finite entries.
template <typename Derived>
void check_sequence(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidArgument(std::string(what) + ": sequence must have T >= 1 and C >= 1, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!all_finite(m)) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace mtms::num
