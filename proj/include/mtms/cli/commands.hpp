#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtms/cli/evaluation.hpp"
#include "mtms/cli/gradcheck_suite.hpp"
#include "mtms/cli/run_config.hpp"
#include "mtms/data/dataset_dir.hpp"
#include "mtms/data/folds.hpp"

namespace mtms::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitArgument = 2,
  kExitIo = 3,
  kExitNumeric = 4,
  kExitCheckFailed = 5,  // gradcheck, acceptance or invariant failure
};

// Reads cfg.dataset, applies cfg.ontology and cfg.stride, and copies the
// feature width and class counts of the data into cfg.model.
data::LoadedDataset load_dataset(RunConfig& cfg);

// Dataset directory at cfg.dataset; prints a summary with class histograms.
int cmd_generate(const RunConfig& cfg, std::ostream& out);

// Trains cfg.model on fold cfg.fold; writes model.ckpt and history.json under
// cfg.output.
int cmd_train(RunConfig cfg, std::ostream& out);

// Scores a checkpoint on every video of cfg.dataset; writes evaluation.json
// under cfg.output.
int cmd_evaluate(RunConfig cfg, const std::string& checkpoint, std::ostream& out);

struct PredictOptions {
  std::string checkpoint;
  std::string sequence;
  std::string out_path;     // predictions JSON
  std::string ribbon_path;  // SVG, optional
  bool online = false;
};

int cmd_predict(const PredictOptions& options, std::ostream& out);

// Models trained and scored on one fold. Variants whose names end in _phase
// and _step with the same prefix are also combined into "<a>+<b>".
struct FoldResult {
  int fold = 0;
  data::Fold split;
  std::vector<ModelEvaluation> models;
};

struct CrossvalResult {
  RunConfig config;  // with the dims taken from the dataset
  std::vector<FoldResult> folds;
  nlohmann::ordered_json aggregate;
  std::string table;  // markdown
};

// Library form of crossval; `log` receives one line per finished model and
// may be called from worker threads, never concurrently.
CrossvalResult run_crossval(RunConfig cfg, const std::function<void(const std::string&)>& log = {});

// Writes fold_<k>.json, aggregate.json and table.md under cfg.output and
// prints the table.
int cmd_crossval(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out);

}  // namespace mtms::cli
