#include "mtms/cli/gradcheck_suite.hpp"

#include <functional>

#include "mtms/models/forward.hpp"
#include "mtms/models/loss.hpp"
#include "mtms/num/gradcheck.hpp"

namespace mtms::cli {

namespace {

using num::GradientTape;
using num::LossBuilder;
using num::Mat;
using num::Var;

Mat random_mat(num::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, scale);
  return m;
}

std::vector<int> random_labels(num::Rng& rng, Eigen::Index n, int classes) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
  return y;
}

struct Case {
  std::string op;
  std::vector<Mat> values;
  LossBuilder build;
};

LossBuilder model_loss(const models::ModelParams& p, Mat x, std::vector<int> yp, std::vector<int> ys, bool dropout,
                       std::uint64_t mask_seed) {
  return [=](GradientTape& tape, const std::vector<Mat>& v) {
    models::ModelParams q = p;
    const auto refs = models::param_refs(q);
    for (std::size_t i = 0; i < refs.size(); ++i) *refs[i] = v[i];
    num::Rng masks(mask_seed);
    const auto heads = models::record_forward(tape, q, x, {dropout, &masks});
    return models::record_multi_task_loss(tape, heads, yp, ys).total;
  };
}

std::vector<Mat> model_values(const models::ModelParams& p) {
  std::vector<Mat> v;
  models::for_each_param(p, [&](const Mat& m) { v.push_back(m); });
  return v;
}

}  // namespace

std::vector<GradcheckLine> run_gradcheck_suite(const GradcheckOptions& o) {
  if (o.frames < 1 || o.frames > 16) throw InvalidArgument("gradcheck: frames must lie in [1, 16]");
  if (o.filters < 1 || o.filters > 8) throw InvalidArgument("gradcheck: filters must lie in [1, 8]");
  num::Rng rng(o.seed);
  const Eigen::Index T = o.frames;
  const int F = o.filters;
  const int phases = 3, steps = 4, dim = 5;

  const Mat probe = random_mat(rng, 2 * F + 8, 1);
  // Random linear read-out so every output entry reaches the loss.
  auto readout = [probe](GradientTape& t, Var v) {
    const Eigen::Index width = t.value(v).cols();
    return t.sum(t.conv1d_causal(v, t.constant(probe.topRows(width)), t.constant(Mat::Zero(1, 1)), 1, 1));
  };
  const std::vector<int> y = random_labels(rng, T, F);
  const std::vector<double> class_weights = [&] {
    std::vector<double> w(static_cast<std::size_t>(F));
    for (auto& x : w) x = rng.uniform(0.2, 2.0);
    return w;
  }();
  const num::DropoutMask mask = num::sample_dropout_mask(T, F, 0.5, rng);

  std::vector<Case> cases;
  cases.push_back({"conv1d_causal",
                   {random_mat(rng, T, F), random_mat(rng, 3 * F, F, 0.5), random_mat(rng, 1, F, 0.5)},
                   [=](GradientTape& t, const std::vector<Mat>& v) {
                     const Var x = t.parameter(v[0]), w = t.parameter(v[1]), b = t.parameter(v[2]);
                     return readout(t, t.conv1d_causal(x, w, b, 2, 3));
                   }});
  cases.push_back({"relu", {random_mat(rng, T, F)}, [=](GradientTape& t, const std::vector<Mat>& v) {
                     return readout(t, t.relu(t.parameter(v[0])));
                   }});
  cases.push_back({"add", {random_mat(rng, T, F), random_mat(rng, T, F)},
                   [=](GradientTape& t, const std::vector<Mat>& v) {
                     const Var a = t.parameter(v[0]), b = t.parameter(v[1]);
                     return readout(t, t.add(a, b));
                   }});
  cases.push_back({"scale", {random_mat(rng, T, F)}, [=](GradientTape& t, const std::vector<Mat>& v) {
                     return readout(t, t.scale(t.parameter(v[0]), -0.7));
                   }});
  cases.push_back({"dropout", {random_mat(rng, T, F)}, [=](GradientTape& t, const std::vector<Mat>& v) {
                     return readout(t, t.dropout(t.parameter(v[0]), mask));
                   }});
  cases.push_back({"softmax_rows", {random_mat(rng, T, F)}, [=](GradientTape& t, const std::vector<Mat>& v) {
                     return readout(t, t.softmax_rows(t.parameter(v[0])));
                   }});
  cases.push_back({"concat_cols", {random_mat(rng, T, F), random_mat(rng, T, 3)},
                   [=](GradientTape& t, const std::vector<Mat>& v) {
                     const Var a = t.parameter(v[0]), b = t.parameter(v[1]);
                     return readout(t, t.concat_cols(a, b));
                   }});
  cases.push_back({"softmax_xent", {random_mat(rng, T, F, 2.0)}, [=](GradientTape& t, const std::vector<Mat>& v) {
                     return t.softmax_xent(t.parameter(v[0]), y);
                   }});
  cases.push_back({"softmax_xent_weighted", {random_mat(rng, T, F, 2.0)},
                   [=](GradientTape& t, const std::vector<Mat>& v) {
                     return t.softmax_xent(t.parameter(v[0]), y, std::span<const double>(class_weights));
                   }});
  cases.push_back({"sum", {random_mat(rng, T, F)}, [=](GradientTape& t, const std::vector<Mat>& v) {
                     return t.sum(t.parameter(v[0]));
                   }});
  cases.push_back({"lstm",
                   {random_mat(rng, T, dim), random_mat(rng, dim, 4 * F, 0.5), random_mat(rng, F, 4 * F, 0.5),
                    random_mat(rng, 1, 4 * F, 0.5)},
                   [=](GradientTape& t, const std::vector<Mat>& v) {
                     const Var x = t.parameter(v[0]), wx = t.parameter(v[1]), wh = t.parameter(v[2]),
                               b = t.parameter(v[3]);
                     return readout(t, t.lstm(x, wx, wh, b));
                   }});
  cases.push_back({"dilated_residual_block",
                   {random_mat(rng, T, F), random_mat(rng, 3 * F, F, 0.5), random_mat(rng, 1, F, 0.5),
                    random_mat(rng, F, F, 0.5), random_mat(rng, 1, F, 0.5)},
                   [=](GradientTape& t, const std::vector<Mat>& v) {
                     const Var x = t.parameter(v[0]), w1 = t.parameter(v[1]), b1 = t.parameter(v[2]),
                               w2 = t.parameter(v[3]), b2 = t.parameter(v[4]);
                     const Var branch = t.conv1d_causal(t.relu(t.conv1d_causal(x, w1, b1, 4, 3)), w2, b2, 1, 1);
                     return readout(t, t.add(x, t.dropout(branch, mask)));
                   }});

  models::TcnConfig tcn;
  tcn.input_dim = dim;
  tcn.num_stages = 2;
  tcn.layers_per_stage = 3;
  tcn.filters = F;
  tcn.num_phases = phases;
  tcn.num_steps = steps;
  const Mat x = random_mat(rng, T, dim);
  const auto yp = random_labels(rng, T, phases), ys = random_labels(rng, T, steps);
  auto add_model = [&](const std::string& name, const models::TcnConfig& c, bool dropout) {
    const models::ModelParams p = models::build_model(c, o.seed + 1);
    cases.push_back({name, model_values(p), model_loss(p, x, yp, ys, dropout, o.seed + 2)});
  };
  add_model("mtms_tcn", tcn, true);
  models::TcnConfig single = tcn;
  single.multi_task = false;
  single.task = models::Task::step;
  add_model("single_task_tcn", single, false);
  models::TcnConfig lstm = tcn;
  lstm.arch = models::Architecture::lstm;
  lstm.lstm_hidden = F;
  add_model("lstm_model", lstm, false);
  models::TcnConfig fw = tcn;
  fw.arch = models::Architecture::framewise;
  fw.framewise_hidden = F;
  add_model("framewise_model", fw, false);

  std::function<void(std::vector<Mat>&)> tamper;
  if (o.inject_fault) {
    tamper = [](std::vector<Mat>& g) { g[0](0, 0) += 1e-2 * (1.0 + std::abs(g[0](0, 0))); };
  }
  std::vector<GradcheckLine> lines;
  for (const Case& c : cases) {
    const num::GradcheckReport r = num::gradcheck(c.build, c.values, o.step, tamper);
    lines.push_back({c.op, r.max_rel_error, r.entries, r.max_rel_error < o.tolerance, r.worst_param,
                     static_cast<long>(r.worst_index), r.worst_analytic, r.worst_numeric});
  }
  return lines;
}

}  // namespace mtms::cli
