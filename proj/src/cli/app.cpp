#include "mtms/cli/app.hpp"

#include <cstdlib>
#include <functional>
#include <memory>

#include <CLI11.hpp>

#include "mtms/cli/commands.hpp"
#include "mtms/num/errors.hpp"

namespace mtms::cli {

namespace {

// Overrides run after the profile and config file have been applied. Each
// one only fires when its flag was given.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& help,
                   std::function<void(RunConfig&, const T&)> set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply_.push_back([opt, value, set](RunConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& help,
                    std::function<void(RunConfig&)> set) {
    CLI::Option* opt = app->add_flag(flag, help);
    apply_.push_back([opt, set](RunConfig& c) {
      if (opt->count() > 0) set(c);
    });
    return opt;
  }

  void apply(RunConfig& c) const {
    for (const auto& f : apply_) f(c);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> apply_;
};

struct Common {
  std::string config_path;
  std::string profile;
};

void add_common(CLI::App* sub, Common& common, Overrides& ov) {
  sub->add_option("--config", common.config_path, "JSON run config")->check(CLI::ExistingFile);
  sub->add_option("--profile", common.profile, "desk or full defaults");
  ov.add<std::string>(sub, "--dataset", "dataset directory", [](RunConfig& c, const std::string& v) { c.dataset = v; });
  ov.add<std::string>(sub, "--ontology", "ontology JSON replacing the dataset's",
                      [](RunConfig& c, const std::string& v) { c.ontology = v; });
  ov.add<std::string>(sub, "--output", "output directory", [](RunConfig& c, const std::string& v) { c.output = v; });
  ov.flag(sub, "--verbose", "per-epoch progress on stderr", [](RunConfig& c) { c.train.verbose = true; });
}

void add_model_options(CLI::App* sub, Overrides& ov) {
  ov.add<std::string>(sub, "--arch", "tcn, lstm or framewise",
                      [](RunConfig& c, const std::string& v) { c.model.arch = models::parse_architecture(v); });
  ov.add<int>(sub, "--stages", "TCN stages", [](RunConfig& c, const int& v) { c.model.num_stages = v; });
  ov.add<int>(sub, "--layers", "layers per stage", [](RunConfig& c, const int& v) { c.model.layers_per_stage = v; });
  ov.add<int>(sub, "--filters", "TCN channels", [](RunConfig& c, const int& v) { c.model.filters = v; });
  ov.add<int>(sub, "--kernel", "dilated kernel size", [](RunConfig& c, const int& v) { c.model.kernel = v; });
  ov.add<double>(sub, "--dropout", "dropout rate", [](RunConfig& c, const double& v) { c.model.dropout = v; });
  ov.add<int>(sub, "--lstm-hidden", "LSTM width", [](RunConfig& c, const int& v) { c.model.lstm_hidden = v; });
  ov.add<int>(sub, "--framewise-hidden", "frame-wise hidden width",
              [](RunConfig& c, const int& v) { c.model.framewise_hidden = v; });
  ov.add<std::string>(sub, "--task", "head of a single-task model: phase or step",
                      [](RunConfig& c, const std::string& v) { c.model.task = models::parse_task(v); });
  ov.flag(sub, "--single-task", "one head only (see --task)", [](RunConfig& c) { c.model.multi_task = false; });
  ov.add<int>(sub, "--epochs", "training epochs", [](RunConfig& c, const int& v) { c.train.epochs = v; });
  ov.add<double>(sub, "--lr", "Adam learning rate", [](RunConfig& c, const double& v) { c.train.lr = v; });
  ov.add<std::uint64_t>(sub, "--seed", "training seed", [](RunConfig& c, const std::uint64_t& v) { c.train.seed = v; });
  ov.add<std::string>(sub, "--selection", "phase_acc, step_acc or mean_acc", [](RunConfig& c, const std::string& v) {
    c.train.selection_metric = models::parse_selection_metric(v);
  });
  ov.add<int>(sub, "--framewise-epochs", "epochs of the frame-wise model",
              [](RunConfig& c, const int& v) { c.train.framewise_epochs = v; });
  ov.add<double>(sub, "--framewise-lr", "learning rate of the frame-wise model",
                 [](RunConfig& c, const double& v) { c.train.framewise_lr = v; });
  ov.add<int>(sub, "--folds", "k of k-fold cross-validation", [](RunConfig& c, const int& v) { c.folds = v; });
  ov.add<int>(sub, "--val-count", "validation videos per fold", [](RunConfig& c, const int& v) { c.val_count = v; });
  ov.add<std::uint64_t>(sub, "--fold-seed", "fold shuffle seed",
                        [](RunConfig& c, const std::uint64_t& v) { c.fold_seed = v; });
  ov.add<int>(sub, "--stride", "temporal subsampling stride", [](RunConfig& c, const int& v) { c.stride = v; });
}

void add_generate_options(CLI::App* sub, Overrides& ov) {
  ov.add<int>(sub, "--num-videos", "videos to generate", [](RunConfig& c, const int& v) { c.num_videos = v; });
  ov.add<std::uint64_t>(sub, "--seed", "video sampling seed",
                        [](RunConfig& c, const std::uint64_t& v) { c.generate_seed = v; });
  ov.add<std::uint64_t>(sub, "--spec-seed", "cluster center seed",
                        [](RunConfig& c, const std::uint64_t& v) { c.workflow.seed = v; });
  ov.add<int>(sub, "--feature-dim", "feature width D", [](RunConfig& c, const int& v) { c.workflow.feature_dim = v; });
  ov.add<int>(sub, "--num-phases", "phase classes", [](RunConfig& c, const int& v) { c.workflow.num_phases = v; });
  ov.add<int>(sub, "--num-steps", "step classes", [](RunConfig& c, const int& v) { c.workflow.num_steps = v; });
  ov.add<double>(sub, "--dwell-mean", "mean frames per step",
                 [](RunConfig& c, const double& v) { c.workflow.dwell_mean = v; });
  ov.add<double>(sub, "--dwell-sd-ratio", "dwell sd as a fraction of the mean",
                 [](RunConfig& c, const double& v) { c.workflow.dwell_sd_ratio = v; });
  ov.add<double>(sub, "--imbalance", "log spread of per-step dwell multipliers",
                 [](RunConfig& c, const double& v) { c.workflow.imbalance = v; });
  ov.add<double>(sub, "--phase-skip", "phase skip probability",
                 [](RunConfig& c, const double& v) { c.workflow.phase_skip_prob = v; });
  ov.add<double>(sub, "--step-skip", "step skip probability",
                 [](RunConfig& c, const double& v) { c.workflow.step_skip_prob = v; });
  ov.add<double>(sub, "--center-scale", "cluster center scale",
                 [](RunConfig& c, const double& v) { c.workflow.center_scale = v; });
  ov.add<double>(sub, "--noise", "feature noise sd", [](RunConfig& c, const double& v) { c.workflow.noise = v; });
  ov.add<int>(sub, "--smoothing", "noise smoothing window", [](RunConfig& c, const int& v) { c.workflow.smoothing = v; });
  ov.add<double>(sub, "--fps", "frame rate", [](RunConfig& c, const double& v) { c.workflow.fps = v; });
}

bool env_verbose() {
  const char* v = std::getenv("MTMS_VERBOSE");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

RunConfig resolve(const Common& common, const Overrides& ov) {
  std::string profile = common.profile;
  if (!common.config_path.empty()) {
    // Read once for the profile key; the full file is applied below.
    const RunConfig probe = read_run_config(common.config_path, RunConfig{});
    if (profile.empty()) profile = probe.profile;
  }
  RunConfig cfg = profile_config(profile.empty() ? "desk" : profile);
  if (!common.config_path.empty()) cfg = read_run_config(common.config_path, cfg);
  if (!common.profile.empty()) cfg.profile = common.profile;
  if (env_verbose()) cfg.train.verbose = true;
  ov.apply(cfg);
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task multi-stage temporal convolutional networks for online surgical activity recognition"};
  app.require_subcommand(1);
  Common common;
  Overrides ov;

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset directory");
  add_common(generate, common, ov);
  add_generate_options(generate, ov);

  CLI::App* train = app.add_subcommand("train", "train one model on one fold");
  add_common(train, common, ov);
  add_model_options(train, ov);
  ov.add<int>(train, "--fold", "fold to train on", [](RunConfig& c, const int& v) { c.fold = v; });

  CLI::App* crossval = app.add_subcommand("crossval", "k-fold cross-validation of several models");
  add_common(crossval, common, ov);
  add_model_options(crossval, ov);
  ov.add<std::vector<std::string>>(crossval, "--variants", "models to compare",
                                   [](RunConfig& c, const std::vector<std::string>& v) { c.variants = v; })
      ->delimiter(',');
  ov.add<int>(crossval, "--jobs", "folds trained concurrently", [](RunConfig& c, const int& v) { c.jobs = v; });

  std::string checkpoint;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a dataset");
  add_common(evaluate, common, ov);
  evaluate->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  ov.add<int>(evaluate, "--stride", "temporal subsampling stride", [](RunConfig& c, const int& v) { c.stride = v; });

  PredictOptions predict_opts;
  CLI::App* predict = app.add_subcommand("predict", "per-frame predictions for one sequence file");
  predict->add_option("--checkpoint", predict_opts.checkpoint, "model checkpoint")->required();
  predict->add_option("--sequence", predict_opts.sequence, ".fseq file")->required();
  predict->add_option("--out", predict_opts.out_path, "predictions JSON")->default_str("predictions.json");
  predict->add_option("--ribbon", predict_opts.ribbon_path, "also write an SVG ribbon here");
  predict->add_flag("--online", predict_opts.online, "feed frames one at a time");

  GradcheckOptions gc;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every gradient");
  gradcheck->add_option("--seed", gc.seed, "seed of the random inputs and weights");
  gradcheck->add_option("--frames", gc.frames, "sequence length (1-16)");
  gradcheck->add_option("--filters", gc.filters, "channel width (1-8)");
  gradcheck->add_flag("--inject-fault", gc.inject_fault, "corrupt one analytic gradient per op");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitArgument;
  }

  try {
    if (*generate) return cmd_generate(resolve(common, ov), out);
    if (*train) return cmd_train(resolve(common, ov), out);
    if (*crossval) return cmd_crossval(resolve(common, ov), out, err);
    if (*evaluate) return cmd_evaluate(resolve(common, ov), checkpoint, out);
    if (*predict) return cmd_predict(predict_opts, out);
    if (*gradcheck) return cmd_gradcheck(gc, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgument;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace mtms::cli
