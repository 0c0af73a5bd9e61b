#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtms/data/sequence.hpp"
#include "mtms/metrics/metrics.hpp"
#include "mtms/models/params.hpp"

namespace mtms::cli {

using Predictions = std::vector<metrics::LabelSequence>;  // one per video

// Scores of one stage on a set of videos. Each task is present only when the
// model predicts it; joint accuracy needs both.
struct StageEvaluation {
  std::optional<metrics::MetricsReport> phase;
  std::optional<metrics::MetricsReport> step;
  std::optional<double> joint;
  Predictions phase_pred;
  Predictions step_pred;
};

struct ModelEvaluation {
  std::string name;
  std::vector<StageEvaluation> stages;
};

// Raised when a joint accuracy exceeds the accuracy of either of its tasks.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ModelEvaluation evaluate_model(const std::string& name, const models::ModelParams& params,
                               const data::Dataset& videos);

// Phase predictions from one model paired with step predictions from
// another, stage by stage; the shorter model's last stage is reused.
ModelEvaluation combine_models(const std::string& name, const ModelEvaluation& phase_model,
                               const ModelEvaluation& step_model, const data::Dataset& videos);

nlohmann::ordered_json to_json(const ModelEvaluation& e);

}  // namespace mtms::cli
