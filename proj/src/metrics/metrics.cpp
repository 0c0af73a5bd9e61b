#include "mtms/metrics/metrics.hpp"

#include <cmath>

#include "mtms/num/errors.hpp"

namespace mtms::metrics {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

}  // namespace

double frame_accuracy(const LabelSequence& gt, const LabelSequence& pred) {
  check_lengths(gt.size(), pred.size(), "frame_accuracy");
  if (gt.empty()) throw InvalidArgument("frame_accuracy: empty sequence");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) hits += gt[t] == pred[t];
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

double dataset_accuracy(std::span<const LabelSequence> gt, std::span<const LabelSequence> pred, bool pooled) {
  check_lengths(gt.size(), pred.size(), "dataset_accuracy");
  if (gt.empty()) throw InvalidArgument("dataset_accuracy: no videos");
  if (pooled) {
    std::size_t hits = 0;
    std::size_t total = 0;
    for (std::size_t v = 0; v < gt.size(); ++v) {
      check_lengths(gt[v].size(), pred[v].size(), "dataset_accuracy");
      for (std::size_t t = 0; t < gt[v].size(); ++t) hits += gt[v][t] == pred[v][t];
      total += gt[v].size();
    }
    return static_cast<double>(hits) / static_cast<double>(total);
  }
  double sum = 0.0;
  for (std::size_t v = 0; v < gt.size(); ++v) sum += frame_accuracy(gt[v], pred[v]);
  return sum / static_cast<double>(gt.size());
}

MetricsReport per_class_prf(const LabelSequence& gt, const LabelSequence& pred, int num_classes) {
  check_lengths(gt.size(), pred.size(), "per_class_prf");
  if (num_classes < 1) throw InvalidArgument("per_class_prf: need at least one class");
  const auto nc = static_cast<std::size_t>(num_classes);
  std::vector<long> hit(nc, 0), support(nc, 0), predicted(nc, 0);
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const int g = gt[t];
    const int p = pred[t];
    if (g < 0 || g >= num_classes || p < 0 || p >= num_classes) {
      throw InvalidArgument("per_class_prf: label out of range at frame " + std::to_string(t));
    }
    ++support[static_cast<std::size_t>(g)];
    ++predicted[static_cast<std::size_t>(p)];
    if (g == p) ++hit[static_cast<std::size_t>(g)];
  }

  MetricsReport r;
  long hits = 0;
  for (long h : hit) hits += h;
  r.accuracy = gt.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(gt.size());
  r.per_class.resize(nc);
  std::size_t included = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    ClassScores& s = r.per_class[c];
    s.support = support[c];
    s.predicted_count = predicted[c];
    if (support[c] == 0 && predicted[c] == 0) {
      r.excluded_classes.push_back(static_cast<int>(c));
      continue;
    }
    s.pr = predicted[c] > 0 ? static_cast<double>(hit[c]) / static_cast<double>(predicted[c]) : 0.0;
    s.re = support[c] > 0 ? static_cast<double>(hit[c]) / static_cast<double>(support[c]) : 0.0;
    s.f1 = s.pr + s.re > 0.0 ? 2.0 * s.pr * s.re / (s.pr + s.re) : 0.0;
    r.macro_pr += s.pr;
    r.macro_re += s.re;
    r.macro_f1 += s.f1;
    ++included;
  }
  if (included > 0) {
    r.macro_pr /= static_cast<double>(included);
    r.macro_re /= static_cast<double>(included);
    r.macro_f1 /= static_cast<double>(included);
  }
  return r;
}

MetricsReport evaluate_videos(std::span<const LabelSequence> gt, std::span<const LabelSequence> pred,
                              int num_classes) {
  check_lengths(gt.size(), pred.size(), "evaluate_videos");
  LabelSequence all_gt, all_pred;
  for (std::size_t v = 0; v < gt.size(); ++v) {
    check_lengths(gt[v].size(), pred[v].size(), "evaluate_videos");
    all_gt.insert(all_gt.end(), gt[v].begin(), gt[v].end());
    all_pred.insert(all_pred.end(), pred[v].begin(), pred[v].end());
  }
  MetricsReport r = per_class_prf(all_gt, all_pred, num_classes);
  r.accuracy = dataset_accuracy(gt, pred);
  return r;
}

double joint_accuracy(const LabelSequence& phase_gt, const LabelSequence& phase_pred, const LabelSequence& step_gt,
                      const LabelSequence& step_pred) {
  check_lengths(phase_gt.size(), phase_pred.size(), "joint_accuracy");
  check_lengths(phase_gt.size(), step_gt.size(), "joint_accuracy");
  check_lengths(step_gt.size(), step_pred.size(), "joint_accuracy");
  if (phase_gt.empty()) throw InvalidArgument("joint_accuracy: empty sequence");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < phase_gt.size(); ++t) {
    hits += phase_gt[t] == phase_pred[t] && step_gt[t] == step_pred[t];
  }
  return static_cast<double>(hits) / static_cast<double>(phase_gt.size());
}

double dataset_joint_accuracy(std::span<const LabelSequence> phase_gt, std::span<const LabelSequence> phase_pred,
                              std::span<const LabelSequence> step_gt, std::span<const LabelSequence> step_pred) {
  check_lengths(phase_gt.size(), phase_pred.size(), "dataset_joint_accuracy");
  check_lengths(phase_gt.size(), step_gt.size(), "dataset_joint_accuracy");
  check_lengths(phase_gt.size(), step_pred.size(), "dataset_joint_accuracy");
  if (phase_gt.empty()) throw InvalidArgument("dataset_joint_accuracy: no videos");
  double sum = 0.0;
  for (std::size_t v = 0; v < phase_gt.size(); ++v) {
    sum += joint_accuracy(phase_gt[v], phase_pred[v], step_gt[v], step_pred[v]);
  }
  return sum / static_cast<double>(phase_gt.size());
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean_std: no values");
  MeanStd out;
  // Offsets from the first value, so equal values give an exact mean and 0 std.
  double offset = 0.0;
  for (double v : values) offset += v - values[0];
  out.mean = values[0] + offset / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

FoldAggregate aggregate_folds(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InvalidArgument("aggregate_folds: no fold reports");
  std::vector<double> acc, pr, re, f1;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    pr.push_back(r.macro_pr);
    re.push_back(r.macro_re);
    f1.push_back(r.macro_f1);
  }
  return {reports.size(), mean_std(acc), mean_std(pr), mean_std(re), mean_std(f1)};
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["macro_pr"] = r.macro_pr;
  j["macro_re"] = r.macro_re;
  j["macro_f1"] = r.macro_f1;
  j["excluded_classes"] = r.excluded_classes;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    per.push_back({{"class", c},
                   {"pr", s.pr},
                   {"re", s.re},
                   {"f1", s.f1},
                   {"support", s.support},
                   {"predicted_count", s.predicted_count}});
  }
  j["per_class"] = per;
  return j;
}

nlohmann::ordered_json to_json(const MeanStd& v) { return {{"mean", v.mean}, {"std", v.std}}; }

nlohmann::ordered_json to_json(const FoldAggregate& a) {
  return {{"folds", a.folds},
          {"accuracy", to_json(a.accuracy)},
          {"macro_pr", to_json(a.macro_pr)},
          {"macro_re", to_json(a.macro_re)},
          {"macro_f1", to_json(a.macro_f1)}};
}

}  // namespace mtms::metrics
