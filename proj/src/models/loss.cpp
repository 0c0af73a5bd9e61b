#include "mtms/models/loss.hpp"

#include <string>

#include "mtms/num/loss.hpp"

namespace mtms::models {

namespace {

std::optional<std::span<const double>> as_span(const std::optional<std::vector<double>>& w) {
  if (!w) return std::nullopt;
  return std::span<const double>(*w);
}

void check_lengths(std::size_t frames, std::span<const int> phase, std::span<const int> step) {
  if (phase.size() != frames || step.size() != frames) {
    throw InvalidArgument("multi_task_loss: label arrays must have " + std::to_string(frames) + " entries");
  }
}

void finish(LossBreakdown& b) {
  for (const auto& s : b.per_stage) {
    b.l_phase += s.phase;
    b.l_step += s.step;
  }
  b.l_total = b.l_phase + b.l_step;
}

}  // namespace

LossBreakdown multi_task_loss(const StageOutputs& outputs, std::span<const int> phase_labels,
                              std::span<const int> step_labels, const LossWeights& weights) {
  if (outputs.stages.empty()) throw InvalidArgument("multi_task_loss: no stages");
  LossBreakdown b;
  for (const auto& stage : outputs.stages) {
    const Mat& any = stage.phase_logits.size() > 0 ? stage.phase_logits : stage.step_logits;
    check_lengths(static_cast<std::size_t>(any.rows()), phase_labels, step_labels);
    StageLoss s;
    if (stage.phase_logits.size() > 0) {
      s.phase = num::softmax_xent(stage.phase_logits, phase_labels, as_span(weights.phase)).loss;
    }
    if (stage.step_logits.size() > 0) {
      s.step = num::softmax_xent(stage.step_logits, step_labels, as_span(weights.step)).loss;
    }
    b.per_stage.push_back(s);
  }
  finish(b);
  return b;
}

RecordedLoss record_multi_task_loss(num::GradientTape& tape, const std::vector<TapeHeads>& heads,
                                    std::span<const int> phase_labels, std::span<const int> step_labels,
                                    const LossWeights& weights) {
  if (heads.empty()) throw InvalidArgument("multi_task_loss: no stages");
  RecordedLoss r;
  std::optional<num::Var> total;
  auto add = [&](num::Var v) { total = total ? tape.add(*total, v) : v; };
  for (const auto& h : heads) {
    const num::Var any = h.phase_logits ? *h.phase_logits : *h.step_logits;
    check_lengths(static_cast<std::size_t>(tape.value(any).rows()), phase_labels, step_labels);
    StageLoss s;
    if (h.phase_logits) {
      const num::Var l = tape.softmax_xent(*h.phase_logits, phase_labels, as_span(weights.phase));
      s.phase = tape.value(l)(0, 0);
      add(l);
    }
    if (h.step_logits) {
      const num::Var l = tape.softmax_xent(*h.step_logits, step_labels, as_span(weights.step));
      s.step = tape.value(l)(0, 0);
      add(l);
    }
    r.breakdown.per_stage.push_back(s);
  }
  finish(r.breakdown);
  r.total = *total;
  return r;
}

}  // namespace mtms::models
