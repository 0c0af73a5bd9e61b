#pragma once

#include <vector>

#include "mtms/data/sequence.hpp"
#include "mtms/models/forward.hpp"
#include "mtms/models/loss.hpp"

namespace mtms::models {

struct EpochRecord {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // mean l_total over the epoch's videos
  double val_phase_acc = 0;
  double val_step_acc = 0;
  double val_score = 0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  long optimizer_steps = 0;
  int best_epoch = 0;
  double best_score = -1.0;
};

struct TrainResult {
  ModelParams params;  // checkpoint with the best validation score
  TrainingHistory history;
};

// Final-stage accuracies of `params` on `videos` (mean of per-video values).
// A task the model does not predict reports 0.
struct TaskAccuracy {
  double phase = 0.0;
  double step = 0.0;
};
TaskAccuracy evaluate_accuracy(const ModelParams& params, const data::Dataset& videos);

// Validation score used for checkpoint selection. For a single-task model
// every metric reduces to the accuracy of its one head.
double selection_score(const TcnConfig& config, const TaskAccuracy& acc, SelectionMetric metric);

// One optimiser step per training video, videos visited in a seeded shuffled
// order every epoch, Adam with `lr`. The frame-wise model instead uses
// `framewise_lr`, `framewise_epochs` and median-frequency class weights;
// temporal models use unweighted cross-entropy. Ties in the validation score
// keep the earlier epoch.
TrainResult train_temporal(const data::Dataset& train, const data::Dataset& val, const TcnConfig& tcn_cfg,
                           const TrainConfig& train_cfg);

}  // namespace mtms::models
