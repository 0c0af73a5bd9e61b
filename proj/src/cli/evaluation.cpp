#include "mtms/cli/evaluation.hpp"

#include <algorithm>

#include "mtms/models/forward.hpp"

namespace mtms::cli {

namespace {

Predictions gt_phase(const data::Dataset& videos) {
  Predictions out;
  for (const auto& v : videos) out.push_back(v.phase_labels);
  return out;
}

Predictions gt_step(const data::Dataset& videos) {
  Predictions out;
  for (const auto& v : videos) out.push_back(v.step_labels);
  return out;
}

void score(StageEvaluation& s, const data::Dataset& videos, int num_phases, int num_steps) {
  const Predictions gp = gt_phase(videos), gs = gt_step(videos);
  if (!s.phase_pred.empty()) s.phase = metrics::evaluate_videos(gp, s.phase_pred, num_phases);
  if (!s.step_pred.empty()) s.step = metrics::evaluate_videos(gs, s.step_pred, num_steps);
  if (s.phase && s.step) {
    s.joint = metrics::dataset_joint_accuracy(gp, s.phase_pred, gs, s.step_pred);
    if (*s.joint > std::min(s.phase->accuracy, s.step->accuracy)) {
      throw InvariantError("joint accuracy " + std::to_string(*s.joint) + " exceeds a task accuracy");
    }
  }
}

}  // namespace

ModelEvaluation evaluate_model(const std::string& name, const models::ModelParams& params,
                               const data::Dataset& videos) {
  if (videos.empty()) throw InvalidArgument("evaluate: no videos");
  ModelEvaluation e{name, {}};
  for (const auto& v : videos) {
    const models::StageOutputs out = models::forward(params, v.features_f64());
    if (e.stages.empty()) e.stages.resize(out.stages.size());
    for (std::size_t s = 0; s < out.stages.size(); ++s) {
      if (params.config.has_phase_head()) e.stages[s].phase_pred.push_back(out.stages[s].phase_labels);
      if (params.config.has_step_head()) e.stages[s].step_pred.push_back(out.stages[s].step_labels);
    }
  }
  for (auto& s : e.stages) score(s, videos, params.config.num_phases, params.config.num_steps);
  return e;
}

ModelEvaluation combine_models(const std::string& name, const ModelEvaluation& phase_model,
                               const ModelEvaluation& step_model, const data::Dataset& videos) {
  if (phase_model.stages.empty() || step_model.stages.empty()) throw InvalidArgument("combine_models: empty model");
  const std::size_t n = std::max(phase_model.stages.size(), step_model.stages.size());
  ModelEvaluation e{name, std::vector<StageEvaluation>(n)};
  for (std::size_t s = 0; s < n; ++s) {
    const auto& ps = phase_model.stages[std::min(s, phase_model.stages.size() - 1)];
    const auto& ss = step_model.stages[std::min(s, step_model.stages.size() - 1)];
    if (!ps.phase || !ss.step) throw InvalidArgument("combine_models: missing phase or step predictions");
    e.stages[s].phase_pred = ps.phase_pred;
    e.stages[s].step_pred = ss.step_pred;
    score(e.stages[s], videos, static_cast<int>(ps.phase->per_class.size()),
          static_cast<int>(ss.step->per_class.size()));
  }
  return e;
}

nlohmann::ordered_json to_json(const ModelEvaluation& e) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < e.stages.size(); ++s) {
    const auto& st = e.stages[s];
    nlohmann::ordered_json j{{"stage", s + 1}};
    j["phase"] = st.phase ? metrics::to_json(*st.phase) : nlohmann::ordered_json();
    j["step"] = st.step ? metrics::to_json(*st.step) : nlohmann::ordered_json();
    j["joint_accuracy"] = st.joint ? nlohmann::ordered_json(*st.joint) : nlohmann::ordered_json();
    stages.push_back(std::move(j));
  }
  return {{"model", e.name}, {"stages", stages}};
}

}  // namespace mtms::cli
