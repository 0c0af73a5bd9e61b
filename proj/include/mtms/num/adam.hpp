#pragma once

#include <span>
#include <vector>

#include "mtms/num/tensor.hpp"

namespace mtms::num {

// Moments are lazily shaped on the first update.
struct AdamState {
  std::vector<Mat> first_moment;
  std::vector<Mat> second_moment;
  long step_count = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam step applied in place to `params`.
void adam_update(std::span<Mat* const> params, std::span<const Mat> grads, AdamState& state);

}  // namespace mtms::num
