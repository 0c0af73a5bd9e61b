#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mtms/models/forward.hpp"

namespace mtms::models {

struct StageLoss {
  double phase = 0.0;
  double step = 0.0;
};

// l_total = sum over stages of (phase + step); absent heads contribute 0.
struct LossBreakdown {
  double l_phase = 0.0;
  double l_step = 0.0;
  double l_total = 0.0;
  std::vector<StageLoss> per_stage;
};

// Per-class weights for each task; empty optionals mean unweighted.
struct LossWeights {
  std::optional<std::vector<double>> phase;
  std::optional<std::vector<double>> step;
};

// Equal-weight sum of the per-head cross-entropies over every stage.
LossBreakdown multi_task_loss(const StageOutputs& outputs, std::span<const int> phase_labels,
                              std::span<const int> step_labels, const LossWeights& weights = {});

struct RecordedLoss {
  num::Var total;
  LossBreakdown breakdown;
};

RecordedLoss record_multi_task_loss(num::GradientTape& tape, const std::vector<TapeHeads>& heads,
                                    std::span<const int> phase_labels, std::span<const int> step_labels,
                                    const LossWeights& weights = {});

}  // namespace mtms::models
