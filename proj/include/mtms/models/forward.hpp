#pragma once

#include <optional>
#include <vector>

#include "mtms/models/params.hpp"
#include "mtms/num/random.hpp"
#include "mtms/num/tape.hpp"

namespace mtms::models {

// Logits, probabilities and argmax labels of one stage. Members for an absent
// head are empty.
struct StageOutput {
  Mat phase_logits;
  Mat step_logits;
  Mat phase_probs;
  Mat step_probs;
  std::vector<int> phase_labels;
  std::vector<int> step_labels;
};

// One entry per stage; the baselines produce a single stage.
struct StageOutputs {
  std::vector<StageOutput> stages;

  const StageOutput& final_stage() const { return stages.back(); }
};

// `rng` drives the dropout masks and is required when `training` is set.
struct ForwardOptions {
  bool training = false;
  num::Rng* rng = nullptr;
};

struct TapeHeads {
  std::optional<num::Var> phase_logits;
  std::optional<num::Var> step_logits;
};

// Records a forward pass of any architecture on `tape`. Parameters are
// registered in for_each_param order, so tape gradients line up with
// param_refs().
std::vector<TapeHeads> record_forward(num::GradientTape& tape, const ModelParams& params, const Mat& features,
                                      const ForwardOptions& options = {});

// Multi-stage causal TCN. Stage 1 reads the features; every later stage reads
// the concatenated softmax outputs of the previous stage's heads.
StageOutputs forward_mtms_tcn(const ModelParams& params, const Mat& features, bool training = false,
                              num::Rng* rng = nullptr);

// Per-frame two-layer perceptron; no temporal context.
StageOutputs forward_framewise(const ModelParams& params, const Mat& features);

// Unidirectional LSTM over the whole sequence with linear heads.
StageOutputs forward_lstm(const ModelParams& params, const Mat& features);

// Dispatches on params.arch().
StageOutputs forward(const ModelParams& params, const Mat& features, const ForwardOptions& options = {});

// Fills probabilities and labels from logits.
StageOutput finish_stage(Mat phase_logits, Mat step_logits);

}  // namespace mtms::models
