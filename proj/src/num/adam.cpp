#include "mtms/num/adam.hpp"

#include <cmath>
#include <string>

namespace mtms::num {

void adam_update(std::span<Mat* const> params, std::span<const Mat> grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw InvalidArgument("adam_update: " + std::to_string(params.size()) + " parameters but " +
                          std::to_string(grads.size()) + " gradients");
  }
  if (!(state.lr > 0.0) || !(state.beta1 > 0.0 && state.beta1 < 1.0) ||
      !(state.beta2 > 0.0 && state.beta2 < 1.0) || state.step_count < 0) {
    throw InvalidArgument("adam_update: invalid optimizer hyperparameters");
  }
  if (state.first_moment.empty()) {
    for (const Mat* p : params) {
      state.first_moment.push_back(Mat::Zero(p->rows(), p->cols()));
      state.second_moment.push_back(Mat::Zero(p->rows(), p->cols()));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw InvalidArgument("adam_update: optimizer state tracks a different parameter count");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Mat& g = grads[i];
    if (g.rows() != params[i]->rows() || g.cols() != params[i]->cols() ||
        state.first_moment[i].rows() != g.rows() || state.first_moment[i].cols() != g.cols()) {
      throw InvalidArgument("adam_update: shape mismatch for parameter " + std::to_string(i));
    }
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat& m = state.first_moment[i];
    Mat& v = state.second_moment[i];
    const Mat& g = grads[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    params[i]->array() -= state.lr * (m.array() / correction1) /
                          ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

}  // namespace mtms::num
