#include "mtms/num/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mtms::num {

namespace {

struct Evaluation {
  double loss;
  std::uint64_t relu_signature;
};

Evaluation evaluate(const LossBuilder& build, const std::vector<Mat>& values) {
  GradientTape tape(false);
  const Var loss = build(tape, values);
  return {tape.value(loss)(0, 0), tape.relu_signature()};
}

// Shrinks the step while a perturbation moves some relu onto its other
// linear piece, since a difference quotient across a kink is not a derivative.
constexpr int kMaxStepReductions = 6;

}  // namespace

GradcheckReport gradcheck(const LossBuilder& build, const std::vector<Mat>& values, double h,
                          const std::function<void(std::vector<Mat>&)>& tamper) {
  if (!(h > 0.0)) throw InvalidArgument("gradcheck: step must be positive");
  std::vector<Mat> analytic;
  std::uint64_t base_signature = 0;
  {
    GradientTape tape;
    const Var loss = build(tape, values);
    if (tape.parameter_count() != values.size()) {
      throw InvalidArgument("gradcheck: builder registered " + std::to_string(tape.parameter_count()) +
                            " parameters, expected " + std::to_string(values.size()));
    }
    base_signature = tape.relu_signature();
    analytic = tape.reverse_pass(loss);
  }
  if (tamper) tamper(analytic);

  GradcheckReport report;
  std::vector<Mat> probe = values;
  for (std::size_t p = 0; p < probe.size(); ++p) {
    Mat& m = probe[p];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      double step = h;
      double numeric = 0.0;
      for (int k = 0;; ++k, step /= 4.0) {
        m.data()[i] = saved + step;
        const Evaluation up = evaluate(build, probe);
        m.data()[i] = saved - step;
        const Evaluation down = evaluate(build, probe);
        numeric = (up.loss - down.loss) / (2.0 * step);
        const bool smooth = up.relu_signature == base_signature && down.relu_signature == base_signature;
        if (smooth || k == kMaxStepReductions) {
          report.kink_retries += k;
          break;
        }
      }
      m.data()[i] = saved;
      const double a = analytic[p].data()[i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      if (err > report.max_rel_error || report.entries == 0) {
        report.max_rel_error = err;
        report.worst_param = p;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
      ++report.entries;
    }
  }
  return report;
}

}  // namespace mtms::num
