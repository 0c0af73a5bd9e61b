#include "mtms/models/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "mtms/data/weights.hpp"
#include "mtms/metrics/metrics.hpp"
#include "mtms/num/adam.hpp"

namespace mtms::models {

namespace {

void check_dataset(const data::Dataset& videos, const TcnConfig& c, const char* what) {
  if (videos.empty()) throw InvalidArgument(std::string("train_temporal: empty ") + what + " set");
  for (const auto& v : videos) {
    data::validate(v, c.num_phases, c.num_steps);
    if (v.dim() != c.input_dim) {
      throw InvalidArgument("train_temporal: video " + v.video_id + " has feature dimension " +
                            std::to_string(v.dim()) + ", config says " + std::to_string(c.input_dim));
    }
  }
}

LossWeights framewise_weights(const data::Dataset& train, const TcnConfig& c) {
  LossWeights w;
  std::vector<std::vector<int>> phases, steps;
  for (const auto& v : train) {
    phases.push_back(v.phase_labels);
    steps.push_back(v.step_labels);
  }
  if (c.has_phase_head()) w.phase = data::median_frequency_weights(phases, c.num_phases).weights;
  if (c.has_step_head()) w.step = data::median_frequency_weights(steps, c.num_steps).weights;
  return w;
}

}  // namespace

TaskAccuracy evaluate_accuracy(const ModelParams& params, const data::Dataset& videos) {
  std::vector<std::vector<int>> gt_phase, gt_step, pred_phase, pred_step;
  for (const auto& v : videos) {
    const StageOutputs out = forward(params, v.features_f64());
    const StageOutput& fin = out.final_stage();
    gt_phase.push_back(v.phase_labels);
    gt_step.push_back(v.step_labels);
    pred_phase.push_back(fin.phase_labels);
    pred_step.push_back(fin.step_labels);
  }
  TaskAccuracy acc;
  if (params.config.has_phase_head()) acc.phase = metrics::dataset_accuracy(gt_phase, pred_phase);
  if (params.config.has_step_head()) acc.step = metrics::dataset_accuracy(gt_step, pred_step);
  return acc;
}

double selection_score(const TcnConfig& c, const TaskAccuracy& acc, SelectionMetric metric) {
  if (!c.multi_task) return c.task == Task::phase ? acc.phase : acc.step;
  switch (metric) {
    case SelectionMetric::phase_acc: return acc.phase;
    case SelectionMetric::step_acc: return acc.step;
    case SelectionMetric::mean_acc: return 0.5 * (acc.phase + acc.step);
  }
  return 0.0;
}

TrainResult train_temporal(const data::Dataset& train, const data::Dataset& val, const TcnConfig& tcn_cfg,
                           const TrainConfig& train_cfg) {
  validate(tcn_cfg);
  validate(train_cfg);
  check_dataset(train, tcn_cfg, "training");
  check_dataset(val, tcn_cfg, "validation");

  const bool framewise = tcn_cfg.arch == Architecture::framewise;
  const int epochs = framewise ? train_cfg.framewise_epochs : train_cfg.epochs;
  const LossWeights weights = framewise ? framewise_weights(train, tcn_cfg) : LossWeights{};

  TrainResult result{build_model(tcn_cfg, train_cfg.seed), {}};
  ModelParams params = result.params;
  const std::vector<Mat*> refs = param_refs(params);
  num::AdamState adam;
  adam.lr = framewise ? train_cfg.framewise_lr : train_cfg.lr;
  num::Rng rng(train_cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<num::Mat> features;
  for (const auto& v : train) features.push_back(v.features_f64());

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    try {
      rng.shuffle(order);
      double loss_sum = 0.0;
      for (std::size_t idx : order) {
        const auto& video = train[idx];
        num::GradientTape tape;
        const auto heads = record_forward(tape, params, features[idx], {true, &rng});
        const RecordedLoss loss = record_multi_task_loss(tape, heads, video.phase_labels, video.step_labels, weights);
        if (!std::isfinite(loss.breakdown.l_total)) {
          throw NumericError("train_temporal: non-finite loss in epoch " + std::to_string(epoch));
        }
        const std::vector<Mat> grads = tape.reverse_pass(loss.total);
        num::adam_update(refs, grads, adam);
        ++result.history.optimizer_steps;
        loss_sum += loss.breakdown.l_total;
      }
      for (const Mat* p : refs) {
        if (!num::all_finite(*p)) throw NumericError("train_temporal: parameters diverged in epoch " + std::to_string(epoch));
      }

      EpochRecord rec;
      rec.epoch = epoch;
      rec.train_loss = loss_sum / static_cast<double>(train.size());
      const TaskAccuracy acc = evaluate_accuracy(params, val);
      rec.val_phase_acc = acc.phase;
      rec.val_step_acc = acc.step;
      rec.val_score = selection_score(tcn_cfg, acc, train_cfg.selection_metric);
      result.history.epochs.push_back(rec);
      if (rec.val_score > result.history.best_score) {
        result.history.best_score = rec.val_score;
        result.history.best_epoch = epoch;
        result.params = params;
      }
      if (train_cfg.verbose) {
        std::fprintf(stderr, "[%s] epoch %d/%d loss %.5f val phase %.4f step %.4f\n",
                     to_string(tcn_cfg.arch).c_str(), epoch, epochs, rec.train_loss, acc.phase, acc.step);
      }
    } catch (const NumericError& e) {
      const std::string what = e.what();
      if (what.find("epoch") != std::string::npos) throw;
      throw NumericError("train_temporal: " + what + " in epoch " + std::to_string(epoch));
    }
  }
  return result;
}

}  // namespace mtms::models
