#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtms/num/errors.hpp"

namespace mtms::metrics {

using LabelSequence = std::vector<int>;

struct ClassScores {
  double pr = 0.0;
  double re = 0.0;
  double f1 = 0.0;
  long support = 0;          // |GT_c|
  long predicted_count = 0;  // |P_c|
};

// Frame-wise scores on pooled frames. Classes absent from both ground truth
// and prediction are excluded from the macro means.
struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassScores> per_class;
  double macro_pr = 0.0;
  double macro_re = 0.0;
  double macro_f1 = 0.0;
  std::vector<int> excluded_classes;
};

double frame_accuracy(const LabelSequence& gt, const LabelSequence& pred);

// Mean of per-video accuracies, or matches over all frames with `pooled`.
double dataset_accuracy(std::span<const LabelSequence> gt, std::span<const LabelSequence> pred,
                        bool pooled = false);

// PR = |GT_c ∩ P_c| / |P_c|, RE = |GT_c ∩ P_c| / |GT_c|, F1 their harmonic
// mean. PR is 0 when |P_c| = 0 but |GT_c| > 0 (and RE likewise); F1 is 0 when
// PR + RE = 0. `accuracy` is the pooled frame accuracy of the two sequences.
MetricsReport per_class_prf(const LabelSequence& gt, const LabelSequence& pred, int num_classes);

// Concatenates the videos, then scores them; `accuracy` is the mean of
// per-video accuracies.
MetricsReport evaluate_videos(std::span<const LabelSequence> gt, std::span<const LabelSequence> pred,
                              int num_classes);

// Fraction of frames where phase and step are both right.
double joint_accuracy(const LabelSequence& phase_gt, const LabelSequence& phase_pred,
                      const LabelSequence& step_gt, const LabelSequence& step_pred);

// Mean of per-video joint accuracies.
double dataset_joint_accuracy(std::span<const LabelSequence> phase_gt, std::span<const LabelSequence> phase_pred,
                              std::span<const LabelSequence> step_gt, std::span<const LabelSequence> step_pred);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for one value
};

MeanStd mean_std(std::span<const double> values);

// Mean and sample standard deviation of accuracy and macro PR/RE/F1.
struct FoldAggregate {
  std::size_t folds = 0;
  MeanStd accuracy;
  MeanStd macro_pr;
  MeanStd macro_re;
  MeanStd macro_f1;
};

FoldAggregate aggregate_folds(std::span<const MetricsReport> reports);

nlohmann::ordered_json to_json(const MetricsReport& report);
nlohmann::ordered_json to_json(const MeanStd& v);
nlohmann::ordered_json to_json(const FoldAggregate& agg);

}  // namespace mtms::metrics
