#pragma once

#include <functional>
#include <vector>

#include "mtms/num/tape.hpp"

namespace mtms::num {

// Records a scalar loss on `tape`. It must register exactly values.size()
// parameters, in order, from `values`.
using LossBuilder = std::function<Var(GradientTape& tape, const std::vector<Mat>& values)>;

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::size_t entries = 0;
  // Step reductions forced by perturbations that crossed a relu kink.
  std::size_t kink_retries = 0;
  // Location and values of the worst entry.
  std::size_t worst_param = 0;
  Eigen::Index worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares reverse_pass against central differences of step `h` on every
// entry of every parameter. Error per entry is |a - n| / max(|a|, |n|, 1e-6).
// Where a perturbation flips the sign of some relu input the step is divided
// by 4, up to 6 times, so the difference stays on one linear piece.
// `tamper`, when set, edits the analytic gradients before the comparison; it
// exists so callers can check that a wrong gradient is caught.
GradcheckReport gradcheck(const LossBuilder& build, const std::vector<Mat>& values, double h = 1e-5,
                          const std::function<void(std::vector<Mat>&)>& tamper = {});

}  // namespace mtms::num
