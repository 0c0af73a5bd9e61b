#include "mtms/models/config.hpp"

#include "mtms/num/errors.hpp"

namespace mtms::models {

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::tcn: return "tcn";
    case Architecture::framewise: return "framewise";
    case Architecture::lstm: return "lstm";
  }
  return "?";
}

std::string to_string(Task t) { return t == Task::phase ? "phase" : "step"; }

std::string to_string(SelectionMetric m) {
  switch (m) {
    case SelectionMetric::phase_acc: return "phase_acc";
    case SelectionMetric::step_acc: return "step_acc";
    case SelectionMetric::mean_acc: return "mean_acc";
  }
  return "?";
}

Architecture parse_architecture(const std::string& s) {
  if (s == "tcn") return Architecture::tcn;
  if (s == "framewise") return Architecture::framewise;
  if (s == "lstm") return Architecture::lstm;
  throw InvalidArgument("unknown architecture '" + s + "' (expected tcn, framewise or lstm)");
}

Task parse_task(const std::string& s) {
  if (s == "phase") return Task::phase;
  if (s == "step") return Task::step;
  throw InvalidArgument("unknown task '" + s + "' (expected phase or step)");
}

SelectionMetric parse_selection_metric(const std::string& s) {
  if (s == "phase_acc") return SelectionMetric::phase_acc;
  if (s == "step_acc") return SelectionMetric::step_acc;
  if (s == "mean_acc") return SelectionMetric::mean_acc;
  throw InvalidArgument("unknown selection metric '" + s + "'");
}

void validate(const TcnConfig& c) {
  if (c.input_dim < 1) throw InvalidArgument("config: input_dim must be >= 1");
  if (c.num_phases < 1 || c.num_steps < 1) throw InvalidArgument("config: class counts must be >= 1");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw InvalidArgument("config: dropout must lie in [0, 1)");
  switch (c.arch) {
    case Architecture::tcn:
      if (c.num_stages < 1) throw InvalidArgument("config: num_stages must be >= 1");
      if (c.layers_per_stage < 1) throw InvalidArgument("config: layers_per_stage must be >= 1");
      if (c.layers_per_stage > 30) throw InvalidArgument("config: layers_per_stage too large for 2^l dilation");
      if (c.filters < 1 || c.kernel < 1) throw InvalidArgument("config: filters and kernel must be >= 1");
      break;
    case Architecture::lstm:
      if (c.lstm_hidden < 1) throw InvalidArgument("config: lstm_hidden must be >= 1");
      break;
    case Architecture::framewise:
      if (c.framewise_hidden < 1) throw InvalidArgument("config: framewise_hidden must be >= 1");
      break;
  }
}

long receptive_field(const TcnConfig& c) {
  validate(c);
  if (c.arch == Architecture::framewise) return 1;
  if (c.arch == Architecture::lstm) throw InvalidArgument("receptive_field: an LSTM has no finite receptive field");
  const long per_stage = static_cast<long>(c.kernel - 1) * ((1L << c.layers_per_stage) - 1);
  return 1 + c.num_stages * per_stage;
}

void validate(const TrainConfig& c) {
  if (c.epochs < 1 || c.framewise_epochs < 1) throw InvalidArgument("train config: epochs must be >= 1");
  if (!(c.lr > 0.0) || !(c.framewise_lr > 0.0)) throw InvalidArgument("train config: learning rates must be > 0");
}

nlohmann::ordered_json to_json(const TcnConfig& c) {
  return {{"arch", to_string(c.arch)},
          {"input_dim", c.input_dim},
          {"num_stages", c.num_stages},
          {"layers_per_stage", c.layers_per_stage},
          {"filters", c.filters},
          {"kernel", c.kernel},
          {"num_phases", c.num_phases},
          {"num_steps", c.num_steps},
          {"dropout", c.dropout},
          {"multi_task", c.multi_task},
          {"task", to_string(c.task)},
          {"lstm_hidden", c.lstm_hidden},
          {"framewise_hidden", c.framewise_hidden}};
}

TcnConfig tcn_config_from_json(const nlohmann::json& j, TcnConfig c) {
  try {
    if (j.contains("arch")) c.arch = parse_architecture(j.at("arch").get<std::string>());
    c.input_dim = j.value("input_dim", c.input_dim);
    c.num_stages = j.value("num_stages", c.num_stages);
    c.layers_per_stage = j.value("layers_per_stage", c.layers_per_stage);
    c.filters = j.value("filters", c.filters);
    c.kernel = j.value("kernel", c.kernel);
    c.num_phases = j.value("num_phases", c.num_phases);
    c.num_steps = j.value("num_steps", c.num_steps);
    c.dropout = j.value("dropout", c.dropout);
    c.multi_task = j.value("multi_task", c.multi_task);
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
    c.framewise_hidden = j.value("framewise_hidden", c.framewise_hidden);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model config: ") + e.what());
  }
  return c;
}

nlohmann::ordered_json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"lr", c.lr},
          {"seed", c.seed},
          {"selection_metric", to_string(c.selection_metric)},
          {"framewise_lr", c.framewise_lr},
          {"framewise_epochs", c.framewise_epochs}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.lr = j.value("lr", c.lr);
    c.seed = j.value("seed", c.seed);
    if (j.contains("selection_metric")) {
      c.selection_metric = parse_selection_metric(j.at("selection_metric").get<std::string>());
    }
    c.framewise_lr = j.value("framewise_lr", c.framewise_lr);
    c.framewise_epochs = j.value("framewise_epochs", c.framewise_epochs);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("train config: ") + e.what());
  }
  return c;
}

}  // namespace mtms::models
