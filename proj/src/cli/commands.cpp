#include "mtms/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mtms/data/folds.hpp"
#include "mtms/data/synthetic.hpp"
#include "mtms/metrics/ribbon.hpp"
#include "mtms/models/checkpoint.hpp"
#include "mtms/models/forward.hpp"
#include "mtms/models/online.hpp"
#include "mtms/models/train.hpp"
#include "mtms/num/errors.hpp"

namespace mtms::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

void write_json(const std::string& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

data::Ontology generic_ontology(int phases, int steps) {
  data::Ontology o;
  for (int i = 0; i < phases; ++i) o.phases.push_back({i, "P" + std::to_string(i), "phase " + std::to_string(i), false});
  for (int i = 0; i < steps; ++i) o.steps.push_back({i, "S" + std::to_string(i), "step " + std::to_string(i), false});
  return o;
}

std::vector<std::string> class_names(const std::vector<data::ActivityClass>& classes) {
  std::vector<std::string> out;
  for (const auto& c : classes) out.push_back(c.code.empty() ? c.name : c.code + " " + c.name);
  return out;
}

void print_histogram(std::ostream& out, const std::string& title, const std::vector<data::ActivityClass>& classes,
                     const std::vector<long>& counts) {
  out << title << " histogram (frames per class)\n";
  long top = 1;
  for (long c : counts) top = std::max(top, c);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const std::string code = c < classes.size() ? classes[c].code : std::to_string(c);
    const int bar = static_cast<int>(40.0 * static_cast<double>(counts[c]) / static_cast<double>(top) + 0.5);
    char line[64];
    std::snprintf(line, sizeof line, "  %-4s %8ld ", code.c_str(), counts[c]);
    out << line << std::string(static_cast<std::size_t>(bar), '#') << '\n';
  }
}

std::vector<std::string> ids_of(const data::Dataset& videos) {
  std::vector<std::string> ids;
  for (const auto& v : videos) ids.push_back(v.video_id);
  return ids;
}

ordered_json fold_json(const data::Fold& f) { return {{"test", f.test}, {"train", f.train}, {"val", f.val}}; }

ordered_json history_json(const models::TrainingHistory& h) {
  ordered_json epochs = ordered_json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_phase_acc", e.val_phase_acc},
                      {"val_step_acc", e.val_step_acc},
                      {"val_score", e.val_score}});
  }
  return {{"best_epoch", h.best_epoch},
          {"best_score", h.best_score},
          {"optimizer_steps", h.optimizer_steps},
          {"epochs", epochs}};
}

std::string percent(const metrics::MeanStd& v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * v.mean, 100.0 * v.std);
  return buf;
}

std::string stage_name(std::size_t s) {
  static const char* roman[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"};
  return s < 10 ? std::string("Stage ") + roman[s] : "Stage " + std::to_string(s + 1);
}

}  // namespace

data::LoadedDataset load_dataset(RunConfig& cfg) {
  data::LoadedDataset ds = data::read_dataset(cfg.dataset);
  if (!cfg.ontology.empty()) ds.ontology = data::read_ontology(cfg.ontology);
  if (ds.videos.empty()) throw InvalidArgument("dataset " + cfg.dataset + " has no videos");
  if (cfg.stride < 1) throw InvalidArgument("stride must be >= 1");
  for (auto& v : ds.videos) {
    data::validate(v, ds.ontology.num_phases(), ds.ontology.num_steps());
    if (cfg.stride > 1) v = data::subsample(v, cfg.stride);
  }
  cfg.model.input_dim = static_cast<int>(ds.videos.front().dim());
  cfg.model.num_phases = ds.ontology.num_phases();
  cfg.model.num_steps = ds.ontology.num_steps();
  return ds;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.num_videos < 1) throw InvalidArgument("generate: num_videos must be >= 1");
  const data::SyntheticSpec spec = data::make_workflow_spec(cfg.workflow);
  const data::Dataset videos = data::generate_synthetic(spec, cfg.num_videos, cfg.generate_seed);
  data::Ontology ontology = cfg.workflow.num_phases == 11 && cfg.workflow.num_steps == 44
                                ? data::default_ontology()
                                : generic_ontology(cfg.workflow.num_phases, cfg.workflow.num_steps);
  ontology.hierarchy = spec.hierarchy();
  data::validate(ontology);
  // Paths are left out so the same content can be regenerated anywhere.
  ordered_json config = to_json(cfg);
  config.erase("dataset");
  config.erase("output");
  const ordered_json provenance{{"command", "generate"}, {"seed", cfg.generate_seed}, {"config", config}};
  data::write_dataset(cfg.dataset, videos, ontology, provenance);

  std::vector<long> phase_counts(static_cast<std::size_t>(ontology.num_phases()), 0);
  std::vector<long> step_counts(static_cast<std::size_t>(ontology.num_steps()), 0);
  long frames = 0, shortest = -1, longest = 0;
  for (const auto& v : videos) {
    frames += v.frames();
    shortest = shortest < 0 ? v.frames() : std::min<long>(shortest, v.frames());
    longest = std::max<long>(longest, v.frames());
    for (int y : v.phase_labels) ++phase_counts[static_cast<std::size_t>(y)];
    for (int y : v.step_labels) ++step_counts[static_cast<std::size_t>(y)];
  }
  out << "wrote " << videos.size() << " videos to " << cfg.dataset << " (seed " << cfg.generate_seed << ")\n";
  out << "frames: " << frames << " total, " << shortest << " shortest, " << longest << " longest; D="
      << spec.feature_dim << '\n';
  print_histogram(out, "phase", ontology.phases, phase_counts);
  print_histogram(out, "step", ontology.steps, step_counts);
  return kExitOk;
}

int cmd_train(RunConfig cfg, std::ostream& out) {
  const data::LoadedDataset ds = load_dataset(cfg);
  const data::FoldPlan plan = data::kfold_split(ids_of(ds.videos), cfg.folds, cfg.val_count, cfg.fold_seed);
  if (cfg.fold < 0 || cfg.fold >= static_cast<int>(plan.folds.size())) {
    throw InvalidArgument("train: fold " + std::to_string(cfg.fold) + " outside [0, " +
                          std::to_string(plan.folds.size()) + ")");
  }
  const data::Fold& fold = plan.folds[static_cast<std::size_t>(cfg.fold)];
  const models::TrainResult result = models::train_temporal(data::select(ds.videos, fold.train),
                                                            data::select(ds.videos, fold.val), cfg.model, cfg.train);

  ensure_dir(cfg.output);
  ordered_json metadata{{"command", "train"},
                        {"seed", cfg.train.seed},
                        {"config", to_json(cfg)},
                        {"fold", fold_json(fold)},
                        {"phase_names", class_names(ds.ontology.phases)},
                        {"step_names", class_names(ds.ontology.steps)}};
  models::write_checkpoint({result.params, cfg.train.seed, metadata}, join(cfg.output, "model.ckpt"));
  ordered_json history{{"command", "train"}, {"seed", cfg.train.seed}, {"config", to_json(cfg)},
                       {"fold", fold_json(fold)}, {"history", history_json(result.history)}};
  write_json(join(cfg.output, "history.json"), history);

  const auto& best = result.history.epochs.at(static_cast<std::size_t>(result.history.best_epoch - 1));
  char line[160];
  std::snprintf(line, sizeof line, "best epoch %d of %zu: val phase %.4f step %.4f\n", result.history.best_epoch,
                result.history.epochs.size(), best.val_phase_acc, best.val_step_acc);
  out << line << "wrote " << join(cfg.output, "model.ckpt") << '\n';
  return kExitOk;
}

int cmd_evaluate(RunConfig cfg, const std::string& checkpoint, std::ostream& out) {
  const models::Checkpoint ckpt = models::read_checkpoint(checkpoint);
  const data::LoadedDataset ds = load_dataset(cfg);
  const models::TcnConfig& mc = ckpt.params.config;
  if (mc.input_dim != cfg.model.input_dim || mc.num_phases != cfg.model.num_phases ||
      mc.num_steps != cfg.model.num_steps) {
    throw InvalidArgument("evaluate: checkpoint expects D=" + std::to_string(mc.input_dim) + " with " +
                          std::to_string(mc.num_phases) + "/" + std::to_string(mc.num_steps) +
                          " classes, dataset has D=" + std::to_string(cfg.model.input_dim) + " with " +
                          std::to_string(cfg.model.num_phases) + "/" + std::to_string(cfg.model.num_steps));
  }
  const ModelEvaluation e = evaluate_model(models::to_string(mc.arch), ckpt.params, ds.videos);
  ensure_dir(cfg.output);
  write_json(join(cfg.output, "evaluation.json"), {{"command", "evaluate"},
                                                    {"seed", ckpt.seed},
                                                    {"checkpoint", checkpoint},
                                                    {"dataset", cfg.dataset},
                                                    {"model", models::to_json(mc)},
                                                    {"training", ckpt.metadata},
                                                    {"evaluation", to_json(e)}});
  for (std::size_t s = 0; s < e.stages.size(); ++s) {
    const auto& st = e.stages[s];
    char line[160];
    std::snprintf(line, sizeof line, "%s: phase acc %s step acc %s joint %s\n", stage_name(s).c_str(),
                  st.phase ? std::to_string(st.phase->accuracy).c_str() : "-",
                  st.step ? std::to_string(st.step->accuracy).c_str() : "-",
                  st.joint ? std::to_string(*st.joint).c_str() : "-");
    out << line;
  }
  return kExitOk;
}

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const models::Checkpoint ckpt = models::read_checkpoint(o.checkpoint);
  const data::FeatureSequence seq = data::read_sequence(o.sequence);
  const models::TcnConfig& mc = ckpt.params.config;
  if (seq.dim() != mc.input_dim) {
    throw InvalidArgument("predict: checkpoint expects D=" + std::to_string(mc.input_dim) + ", " + o.sequence +
                          " has D=" + std::to_string(seq.dim()));
  }
  const num::Mat x = seq.features_f64();
  const Eigen::Index T = x.rows();
  std::vector<int> phase_labels, step_labels;
  num::Mat phase_probs, step_probs;
  if (o.online) {
    const auto frames = models::predict_online(ckpt.params, x);
    if (mc.has_phase_head()) phase_probs.resize(T, mc.num_phases);
    if (mc.has_step_head()) step_probs.resize(T, mc.num_steps);
    for (Eigen::Index t = 0; t < T; ++t) {
      const auto& f = frames[static_cast<std::size_t>(t)];
      if (mc.has_phase_head()) {
        phase_labels.push_back(f.phase_label);
        phase_probs.row(t) = f.phase_probs;
      }
      if (mc.has_step_head()) {
        step_labels.push_back(f.step_label);
        step_probs.row(t) = f.step_probs;
      }
    }
  } else {
    const models::StageOutputs outputs = models::forward(ckpt.params, x);
    const auto& fin = outputs.final_stage();
    phase_labels = fin.phase_labels;
    step_labels = fin.step_labels;
    phase_probs = fin.phase_probs;
    step_probs = fin.step_probs;
  }

  auto probs_json = [](const num::Mat& p) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index t = 0; t < p.rows(); ++t) {
      std::vector<double> r(p.row(t).data(), p.row(t).data() + p.cols());
      // Row-major storage keeps a row contiguous.
      rows.push_back(r);
    }
    return rows;
  };
  ordered_json j{{"command", "predict"},
                 {"seed", ckpt.seed},
                 {"checkpoint", o.checkpoint},
                 {"model", models::to_json(mc)},
                 {"training", ckpt.metadata},
                 {"video_id", seq.video_id},
                 {"frames", T}};
  if (mc.has_phase_head()) {
    j["phase_labels"] = phase_labels;
    j["phase_probs"] = probs_json(phase_probs);
  }
  if (mc.has_step_head()) {
    j["step_labels"] = step_labels;
    j["step_probs"] = probs_json(step_probs);
  }
  const std::string path = o.out_path.empty() ? "predictions.json" : o.out_path;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  write_json(path, j);
  out << "wrote " << T << " frame predictions to " << path << (o.online ? " (online)" : " (offline)") << '\n';
  if (mc.has_phase_head()) out << "phase accuracy " << metrics::frame_accuracy(seq.phase_labels, phase_labels) << '\n';
  if (mc.has_step_head()) out << "step accuracy " << metrics::frame_accuracy(seq.step_labels, step_labels) << '\n';

  if (!o.ribbon_path.empty()) {
    const bool phase = mc.has_phase_head();
    const auto& meta_names = ckpt.metadata.value(phase ? "phase_names" : "step_names", ordered_json::array());
    const auto names = meta_names.get<std::vector<std::string>>();
    const std::string desc = "task " + std::string(phase ? "phase" : "step") + "; seed " + std::to_string(ckpt.seed) +
                             "; model " + models::to_json(mc).dump();
    metrics::export_ribbon(phase ? seq.phase_labels : seq.step_labels,
                           {{models::to_string(mc.arch), phase ? phase_labels : step_labels}}, names, o.ribbon_path,
                           desc);
    out << "wrote ribbon " << o.ribbon_path << '\n';
  }
  return kExitOk;
}

CrossvalResult run_crossval(RunConfig cfg, const std::function<void(const std::string&)>& log) {
  const data::LoadedDataset ds = load_dataset(cfg);
  if (static_cast<int>(ds.videos.size()) < cfg.folds) {
    throw InvalidArgument("crossval: " + std::to_string(ds.videos.size()) + " videos is fewer than k=" +
                          std::to_string(cfg.folds));
  }
  if (cfg.variants.empty()) throw InvalidArgument("crossval: no model variants requested");
  std::vector<std::pair<std::string, models::TcnConfig>> variants;
  for (const auto& name : cfg.variants) {
    for (const auto& v : variants) {
      if (v.first == name) throw InvalidArgument("crossval: variant '" + name + "' listed twice");
    }
    variants.emplace_back(name, variant_config(name, cfg.model));
  }
  std::vector<std::pair<std::size_t, std::size_t>> combos;
  for (std::size_t a = 0; a < variants.size(); ++a) {
    const std::string& n = variants[a].first;
    if (n.size() < 6 || n.compare(n.size() - 6, 6, "_phase") != 0) continue;
    const std::string partner = n.substr(0, n.size() - 6) + "_step";
    for (std::size_t b = 0; b < variants.size(); ++b) {
      if (variants[b].first == partner) combos.emplace_back(a, b);
    }
  }

  const data::FoldPlan plan = data::kfold_split(ids_of(ds.videos), cfg.folds, cfg.val_count, cfg.fold_seed);
  CrossvalResult result;
  result.config = cfg;
  result.folds.resize(plan.folds.size());
  std::mutex log_mutex;
  auto say = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    log(line);
  };

  auto run_fold = [&](std::size_t k) {
    const data::Fold& f = plan.folds[k];
    const data::Dataset train = data::select(ds.videos, f.train);
    const data::Dataset val = data::select(ds.videos, f.val);
    const data::Dataset test = data::select(ds.videos, f.test);
    FoldResult& fr = result.folds[k];
    fr.fold = static_cast<int>(k);
    fr.split = f;
    models::TrainConfig tc = cfg.train;
    tc.seed = cfg.train.seed + k;
    for (const auto& [name, mc] : variants) {
      const models::TrainResult tr = models::train_temporal(train, val, mc, tc);
      fr.models.push_back(evaluate_model(name, tr.params, test));
      const auto& fin = fr.models.back().stages.back();
      char line[200];
      std::snprintf(line, sizeof line, "fold %zu %-16s best epoch %3d  test phase %s step %s", k, name.c_str(),
                    tr.history.best_epoch, fin.phase ? std::to_string(fin.phase->accuracy).c_str() : "-",
                    fin.step ? std::to_string(fin.step->accuracy).c_str() : "-");
      say(line);
    }
    for (const auto& [a, b] : combos) {
      fr.models.push_back(combine_models(variants[a].first + "+" + variants[b].first, fr.models[a], fr.models[b], test));
    }
  };

  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(plan.folds.size())));
  if (jobs == 1) {
    for (std::size_t k = 0; k < plan.folds.size(); ++k) run_fold(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(plan.folds.size());
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < plan.folds.size(); k = next++) {
          try {
            run_fold(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Aggregate over folds, model by model and stage by stage.
  ordered_json models_json = ordered_json::array();
  std::ostringstream table;
  table << "# " << cfg.folds << "-fold cross-validation\n\n"
        << "videos " << ds.videos.size() << ", fold seed " << cfg.fold_seed << ", train seed " << cfg.train.seed
        << ", epochs " << cfg.train.epochs << ". Values are mean ± std over folds, in percent.\n\n"
        << "| Model | Stage | Phase Acc | Phase PR | Phase RE | Step Acc | Step PR | Step RE | Joint Acc |\n"
        << "|---|---|---|---|---|---|---|---|---|\n";
  const auto& first = result.folds.front().models;
  for (std::size_t m = 0; m < first.size(); ++m) {
    const std::string& name = first[m].name;
    const bool staged = first[m].stages.size() > 1 || name.find("tcn") != std::string::npos;
    ordered_json stages = ordered_json::array();
    for (std::size_t s = 0; s < first[m].stages.size(); ++s) {
      std::vector<metrics::MetricsReport> phase, step;
      std::vector<double> joint;
      for (const auto& fr : result.folds) {
        const auto& st = fr.models[m].stages[s];
        if (st.phase) phase.push_back(*st.phase);
        if (st.step) step.push_back(*st.step);
        if (st.joint) joint.push_back(*st.joint);
      }
      ordered_json sj{{"stage", s + 1}};
      std::string cells[7] = {"-", "-", "-", "-", "-", "-", "-"};
      if (!phase.empty()) {
        const auto a = metrics::aggregate_folds(phase);
        sj["phase"] = metrics::to_json(a);
        cells[0] = percent(a.accuracy);
        cells[1] = percent(a.macro_pr);
        cells[2] = percent(a.macro_re);
      } else {
        sj["phase"] = nullptr;
      }
      if (!step.empty()) {
        const auto a = metrics::aggregate_folds(step);
        sj["step"] = metrics::to_json(a);
        cells[3] = percent(a.accuracy);
        cells[4] = percent(a.macro_pr);
        cells[5] = percent(a.macro_re);
      } else {
        sj["step"] = nullptr;
      }
      if (!joint.empty()) {
        const auto a = metrics::mean_std(joint);
        sj["joint_accuracy"] = metrics::to_json(a);
        cells[6] = percent(a);
      } else {
        sj["joint_accuracy"] = nullptr;
      }
      stages.push_back(std::move(sj));
      table << "| " << name << " | " << (staged ? stage_name(s) : "-");
      for (const auto& c : cells) table << " | " << c;
      table << " |\n";
    }
    models_json.push_back({{"model", name}, {"stages", std::move(stages)}});
  }
  result.table = table.str();
  result.aggregate = {{"command", "crossval"},
                      {"seed", cfg.train.seed},
                      {"config", to_json(cfg)},
                      {"folds", plan.folds.size()},
                      {"models", std::move(models_json)}};
  return result;
}

int cmd_crossval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CrossvalResult r = run_crossval(cfg, [&](const std::string& line) { err << line << '\n'; });
  const RunConfig& resolved = r.config;
  ensure_dir(cfg.output);
  for (const auto& f : r.folds) {
    ordered_json models = ordered_json::array();
    for (const auto& m : f.models) models.push_back(to_json(m));
    write_json(join(cfg.output, "fold_" + std::to_string(f.fold) + ".json"),
               {{"command", "crossval"},
                {"seed", cfg.train.seed + static_cast<std::uint64_t>(f.fold)},
                {"config", to_json(resolved)},
                {"fold", f.fold},
                {"split", fold_json(f.split)},
                {"models", std::move(models)}});
  }
  write_json(join(cfg.output, "aggregate.json"), r.aggregate);
  write_text(join(cfg.output, "table.md"), r.table);
  out << r.table;
  return kExitOk;
}

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<GradcheckLine> lines = run_gradcheck_suite(options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t passed = 0;
  for (const auto& l : lines) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s max_rel_error %.3e  entries %6zu  %s\n", l.op.c_str(), l.max_rel_error,
                  l.entries, l.passed ? "PASS" : "FAIL");
    out << buf;
    if (!l.passed) {
      std::snprintf(buf, sizeof buf, "  worst at input %zu entry %ld: analytic %.9e numeric %.9e\n", l.worst_input,
                    l.worst_entry, l.worst_analytic, l.worst_numeric);
      out << buf;
    }
    passed += l.passed;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "gradcheck: %zu/%zu ops below %.0e (seed %llu, %.1f s)\n", passed, lines.size(),
                options.tolerance, static_cast<unsigned long long>(options.seed), seconds);
  out << buf;
  return passed == lines.size() ? kExitOk : kExitCheckFailed;
}

}  // namespace mtms::cli
