#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtms/data/synthetic.hpp"
#include "mtms/models/config.hpp"

namespace mtms::cli {

// Everything one invocation needs. Built from a profile, then a JSON config
// file, then command-line overrides, in that order.
struct RunConfig {
  std::string profile = "desk";
  std::string dataset = "data";
  std::string ontology;  // replaces the dataset's ontology when set
  std::string output = "runs";

  models::TcnConfig model;
  models::TrainConfig train;

  int folds = 4;
  int val_count = 1;
  std::uint64_t fold_seed = 0;
  int fold = 0;    // which fold `train` uses
  int stride = 1;  // subsampling applied when a dataset is loaded
  int jobs = 1;    // folds trained concurrently by crossval
  std::vector<std::string> variants{"framewise", "lstm", "tcn_phase", "tcn_step", "mtms_tcn"};

  int num_videos = 8;
  std::uint64_t generate_seed = 0;
  data::WorkflowOptions workflow;
};

// "desk": D=64, 8 videos, 20 epochs. "full": D=2048, 40 videos, 200 epochs,
// 4 folds with 6 validation videos.
RunConfig profile_config(const std::string& name);

nlohmann::ordered_json to_json(const RunConfig& c);
// Keys missing from `j` keep their value in `base`.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base);
RunConfig read_run_config(const std::string& path, RunConfig base);

// Model config for a variant name: mtms_tcn, tcn_phase, tcn_step, lstm,
// lstm_phase, lstm_step, framewise, framewise_phase, framewise_step.
models::TcnConfig variant_config(const std::string& variant, models::TcnConfig base);

}  // namespace mtms::cli
