#pragma once

#include <cstring>

#include "mtms/num/conv.hpp"
#include "mtms/num/random.hpp"

namespace testutil {

using mtms::num::ConvParams;
using mtms::num::Mat;
using mtms::num::Rng;

inline Mat random_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, scale);
  return m;
}

inline ConvParams random_conv(Rng& rng, int cin, int cout, int kernel, int dilation, double scale = 0.5) {
  return {random_mat(rng, kernel * cin, cout, scale), random_mat(rng, 1, cout, scale), dilation, kernel};
}

// Same shape and the same bytes.
inline bool bits_equal(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

inline bool rows_bits_equal(const Mat& a, const Mat& b, Eigen::Index rows) {
  return a.cols() == b.cols() && a.rows() >= rows && b.rows() >= rows &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(rows * a.cols())) == 0;
}

}  // namespace testutil
