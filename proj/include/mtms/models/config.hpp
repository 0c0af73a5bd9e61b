#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace mtms::models {

enum class Architecture { tcn, framewise, lstm };
enum class Task { phase, step };
enum class SelectionMetric { phase_acc, step_acc, mean_acc };

std::string to_string(Architecture a);
std::string to_string(Task t);
std::string to_string(SelectionMetric m);
Architecture parse_architecture(const std::string& s);
Task parse_task(const std::string& s);
SelectionMetric parse_selection_metric(const std::string& s);

// Architecture hyperparameters. `filters` and `kernel` shape the TCN stages;
// `lstm_hidden` and `framewise_hidden` the baselines. Layer l of a stage has
// dilation 2^l. With multi_task off only the head for `task` exists.
struct TcnConfig {
  Architecture arch = Architecture::tcn;
  int input_dim = 2048;
  int num_stages = 2;
  int layers_per_stage = 10;
  int filters = 64;
  int kernel = 3;
  int num_phases = 11;
  int num_steps = 44;
  double dropout = 0.5;
  bool multi_task = true;
  Task task = Task::phase;
  int lstm_hidden = 64;
  int framewise_hidden = 256;

  bool has_phase_head() const { return multi_task || task == Task::phase; }
  bool has_step_head() const { return multi_task || task == Task::step; }

  bool operator==(const TcnConfig&) const = default;
};

void validate(const TcnConfig& config);

// Frames of history that can influence one output: 1 + (K-1)(2^L - 1) per
// stage, stages composing by adding their spans. 1 for the frame-wise model.
// The LSTM has unbounded memory and is rejected.
long receptive_field(const TcnConfig& config);

struct TrainConfig {
  int epochs = 200;
  double lr = 3e-4;
  std::uint64_t seed = 0;
  SelectionMetric selection_metric = SelectionMetric::mean_acc;
  double framewise_lr = 1e-5;
  int framewise_epochs = 30;
  // Per-epoch progress lines on stderr.
  bool verbose = false;
};

void validate(const TrainConfig& config);

nlohmann::ordered_json to_json(const TcnConfig& c);
TcnConfig tcn_config_from_json(const nlohmann::json& j, TcnConfig base = {});
nlohmann::ordered_json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace mtms::models
