#include "mtms/cli/run_config.hpp"

#include <fstream>

#include "mtms/num/errors.hpp"

namespace mtms::cli {

RunConfig profile_config(const std::string& name) {
  RunConfig c;
  c.profile = name;
  if (name == "desk") {
    c.model.input_dim = 64;
    c.workflow.feature_dim = 64;
    c.train.epochs = 20;
    c.num_videos = 8;
    c.folds = 4;
    c.val_count = 1;
  } else if (name == "full") {
    c.model.input_dim = 2048;
    c.workflow.feature_dim = 2048;
    c.train.epochs = 200;
    c.num_videos = 40;
    c.folds = 4;
    c.val_count = 6;
  } else {
    throw InvalidArgument("unknown profile '" + name + "' (expected desk or full)");
  }
  return c;
}

namespace {

nlohmann::ordered_json workflow_json(const data::WorkflowOptions& w) {
  return {{"num_phases", w.num_phases},
          {"num_steps", w.num_steps},
          {"feature_dim", w.feature_dim},
          {"dwell_mean", w.dwell_mean},
          {"dwell_sd_ratio", w.dwell_sd_ratio},
          {"imbalance", w.imbalance},
          {"phase_skip_prob", w.phase_skip_prob},
          {"step_skip_prob", w.step_skip_prob},
          {"center_scale", w.center_scale},
          {"noise", w.noise},
          {"smoothing", w.smoothing},
          {"fps", w.fps},
          {"seed", w.seed}};
}

data::WorkflowOptions workflow_from_json(const nlohmann::json& j, data::WorkflowOptions w) {
  w.num_phases = j.value("num_phases", w.num_phases);
  w.num_steps = j.value("num_steps", w.num_steps);
  w.feature_dim = j.value("feature_dim", w.feature_dim);
  w.dwell_mean = j.value("dwell_mean", w.dwell_mean);
  w.dwell_sd_ratio = j.value("dwell_sd_ratio", w.dwell_sd_ratio);
  w.imbalance = j.value("imbalance", w.imbalance);
  w.phase_skip_prob = j.value("phase_skip_prob", w.phase_skip_prob);
  w.step_skip_prob = j.value("step_skip_prob", w.step_skip_prob);
  w.center_scale = j.value("center_scale", w.center_scale);
  w.noise = j.value("noise", w.noise);
  w.smoothing = j.value("smoothing", w.smoothing);
  w.fps = j.value("fps", w.fps);
  w.seed = j.value("seed", w.seed);
  return w;
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c) {
  return {{"profile", c.profile},
          {"dataset", c.dataset},
          {"ontology", c.ontology},
          {"output", c.output},
          {"model", models::to_json(c.model)},
          {"train", models::to_json(c.train)},
          {"folds", {{"k", c.folds}, {"val_count", c.val_count}, {"seed", c.fold_seed}, {"fold", c.fold}}},
          {"stride", c.stride},
          {"jobs", c.jobs},
          {"variants", c.variants},
          {"generate", {{"num_videos", c.num_videos}, {"seed", c.generate_seed}, {"workflow", workflow_json(c.workflow)}}}};
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw InvalidArgument("run config must be a JSON object");
  try {
    c.profile = j.value("profile", c.profile);
    c.dataset = j.value("dataset", c.dataset);
    c.ontology = j.value("ontology", c.ontology);
    c.output = j.value("output", c.output);
    if (j.contains("model")) c.model = models::tcn_config_from_json(j.at("model"), c.model);
    if (j.contains("train")) c.train = models::train_config_from_json(j.at("train"), c.train);
    if (j.contains("folds")) {
      const auto& f = j.at("folds");
      c.folds = f.value("k", c.folds);
      c.val_count = f.value("val_count", c.val_count);
      c.fold_seed = f.value("seed", c.fold_seed);
      c.fold = f.value("fold", c.fold);
    }
    c.stride = j.value("stride", c.stride);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("variants")) c.variants = j.at("variants").get<std::vector<std::string>>();
    if (j.contains("generate")) {
      const auto& g = j.at("generate");
      c.num_videos = g.value("num_videos", c.num_videos);
      c.generate_seed = g.value("seed", c.generate_seed);
      if (g.contains("workflow")) c.workflow = workflow_from_json(g.at("workflow"), c.workflow);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig read_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what(), e.byte);
  }
  return run_config_from_json(j, std::move(base));
}

models::TcnConfig variant_config(const std::string& variant, models::TcnConfig c) {
  using models::Architecture;
  using models::Task;
  auto split = [&](Architecture arch, const std::string& rest) {
    c.arch = arch;
    if (rest.empty()) {
      c.multi_task = true;
    } else if (rest == "_phase" || rest == "_step") {
      c.multi_task = false;
      c.task = rest == "_phase" ? Task::phase : Task::step;
    } else {
      throw InvalidArgument("unknown model variant '" + variant + "'");
    }
    return c;
  };
  if (variant == "mtms_tcn") return split(Architecture::tcn, "");
  for (const auto& [prefix, arch] : {std::pair{std::string("tcn"), Architecture::tcn},
                                     std::pair{std::string("lstm"), Architecture::lstm},
                                     std::pair{std::string("framewise"), Architecture::framewise}}) {
    if (variant.rfind(prefix, 0) == 0) {
      const std::string rest = variant.substr(prefix.size());
      if (prefix == "tcn" && rest.empty()) break;  // ambiguous; say mtms_tcn
      return split(arch, rest);
    }
  }
  throw InvalidArgument("unknown model variant '" + variant + "'");
}

}  // namespace mtms::cli
