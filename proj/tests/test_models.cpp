#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "mtms/data/synthetic.hpp"
#include "mtms/models/checkpoint.hpp"
#include "mtms/models/forward.hpp"
#include "mtms/models/loss.hpp"
#include "mtms/models/online.hpp"
#include "mtms/models/train.hpp"
#include "mtms/num/gradcheck.hpp"

using namespace mtms;
using namespace mtms::models;
using testutil::bits_equal;
using testutil::random_mat;
using testutil::rows_bits_equal;

namespace {

TcnConfig small_tcn(int stages = 2, int layers = 4) {
  TcnConfig c;
  c.input_dim = 6;
  c.num_stages = stages;
  c.layers_per_stage = layers;
  c.filters = 8;
  c.num_phases = 3;
  c.num_steps = 5;
  return c;
}

TcnConfig small_baseline(Architecture arch) {
  TcnConfig c = small_tcn();
  c.arch = arch;
  c.lstm_hidden = 6;
  c.framewise_hidden = 7;
  return c;
}

void zero_all(ModelParams& p) {
  for (Mat* m : param_refs(p)) m->setZero();
}

bool uniform_rows(const Mat& probs) {
  const double u = 1.0 / static_cast<double>(probs.cols());
  return (probs.array() - u).abs().maxCoeff() < 1e-15;
}

std::vector<int> random_labels(num::Rng& rng, Eigen::Index n, int classes) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
  return y;
}

data::Dataset tiny_dataset(int videos, int dim, std::uint64_t seed) {
  data::WorkflowOptions o;
  o.num_phases = 3;
  o.num_steps = 5;
  o.feature_dim = dim;
  o.dwell_mean = 5;
  o.seed = seed;
  return data::generate_synthetic(data::make_workflow_spec(o), videos, seed);
}

}  // namespace

TEST_CASE("config validation and json") {
  TcnConfig c;
  CHECK_NOTHROW(validate(c));
  CHECK(c.input_dim == 2048);
  CHECK(c.num_stages == 2);
  CHECK(c.layers_per_stage == 10);
  CHECK(c.filters == 64);
  CHECK(c.kernel == 3);
  c.num_steps = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  CHECK_THROWS_AS(build_model(c, 1), InvalidArgument);
  c = small_tcn();
  c.multi_task = false;
  c.task = Task::step;
  CHECK(tcn_config_from_json(nlohmann::json::parse(to_json(c).dump())) == c);
  TrainConfig t;
  CHECK(t.epochs == 200);
  CHECK(t.lr == 3e-4);
  CHECK(t.framewise_lr == 1e-5);
  CHECK(t.framewise_epochs == 30);
  t.seed = 0xfedcba9876543210ULL;
  t.selection_metric = SelectionMetric::step_acc;
  const TrainConfig back = train_config_from_json(nlohmann::json::parse(to_json(t).dump()));
  CHECK(back.seed == t.seed);
  CHECK(back.selection_metric == t.selection_metric);
  CHECK_THROWS_AS(parse_architecture("gru"), InvalidArgument);
  t.epochs = 0;
  CHECK_THROWS_AS(validate(t), InvalidArgument);
}

TEST_CASE("build_model") {
  const TcnConfig c = small_tcn();
  const ModelParams a = build_model(c, 42);
  const ModelParams b = build_model(c, 42);
  std::vector<Mat> pa, pb;
  for_each_param(a, [&](const Mat& m) { pa.push_back(m); });
  for_each_param(b, [&](const Mat& m) { pb.push_back(m); });
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(bits_equal(pa[i], pb[i]));
  CHECK_FALSE(bits_equal(build_model(c, 43).stages[0].input.weight, a.stages[0].input.weight));

  TcnConfig def;
  const ModelParams full = build_model(def, 0);
  REQUIRE(full.stages.size() == 2);
  CHECK(full.stages[0].blocks.size() == 10);
  for (int l = 0; l < 10; ++l) CHECK(full.stages[0].blocks[static_cast<std::size_t>(l)].dilated.dilation == (1 << l));
  CHECK(full.stages[1].input.in_channels() == 55);
  CHECK(full.stages[0].input.in_channels() == 2048);

  TcnConfig one = small_tcn(1);
  CHECK(build_model(one, 0).stages.size() == 1);

  TcnConfig single = small_tcn();
  single.multi_task = false;
  const ModelParams s = build_model(single, 0);
  CHECK_FALSE(s.stages[0].heads.step.has_value());
  CHECK(parameter_count(s) < parameter_count(a));
  CHECK(s.stages[1].input.in_channels() == 3);

  for (const Mat* m : param_refs(const_cast<ModelParams&>(a))) CHECK(num::all_finite(*m));
  CHECK(a.stages[0].input.bias.cwiseAbs().maxCoeff() == 0.0);
  // fan-in bound
  const double bound = 1.0 / std::sqrt(3.0 * 8.0);
  CHECK(a.stages[0].blocks[1].dilated.weight.cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("forward_mtms_tcn shapes and edge cases") {
  num::Rng rng(1);
  const TcnConfig c = small_tcn();
  ModelParams p = build_model(c, 3);
  SUBCASE("single frame") {
    const StageOutputs out = forward_mtms_tcn(p, random_mat(rng, 1, 6));
    REQUIRE(out.stages.size() == 2);
    for (const auto& s : out.stages) {
      CHECK(s.phase_probs.rows() == 1);
      CHECK(s.step_probs.cols() == 5);
      CHECK(s.phase_labels.size() == 1);
    }
  }
  SUBCASE("perturbing frame 50 of 100 leaves earlier frames untouched") {
    const Mat x = random_mat(rng, 100, 6);
    Mat y = x;
    y.row(50).array() += 3.0;
    const StageOutputs a = forward_mtms_tcn(p, x), b = forward_mtms_tcn(p, y);
    for (std::size_t s = 0; s < 2; ++s) {
      CHECK(rows_bits_equal(a.stages[s].phase_logits, b.stages[s].phase_logits, 50));
      CHECK(rows_bits_equal(a.stages[s].step_logits, b.stages[s].step_logits, 50));
      CHECK_FALSE(bits_equal(a.stages[s].step_logits, b.stages[s].step_logits));
    }
  }
  SUBCASE("zero weights give uniform probabilities everywhere") {
    zero_all(p);
    const StageOutputs out = forward_mtms_tcn(p, random_mat(rng, 9, 6));
    for (const auto& s : out.stages) {
      CHECK(uniform_rows(s.phase_probs));
      CHECK(uniform_rows(s.step_probs));
    }
  }
  SUBCASE("rows are normalised") {
    const StageOutputs out = forward_mtms_tcn(p, random_mat(rng, 20, 6));
    for (const auto& s : out.stages)
      for (Eigen::Index t = 0; t < 20; ++t) CHECK(std::abs(s.step_probs.row(t).sum() - 1.0) < 1e-12);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(forward_mtms_tcn(p, random_mat(rng, 4, 5)), InvalidArgument);
    CHECK_THROWS_AS(forward_lstm(p, random_mat(rng, 4, 6)), InvalidArgument);
    num::Rng r(1);
    CHECK_THROWS_AS(forward_mtms_tcn(p, random_mat(rng, 4, 6), true), InvalidArgument);
    CHECK_NOTHROW(forward_mtms_tcn(p, random_mat(rng, 4, 6), true, &r));
  }
}

TEST_CASE("training-mode dropout is seeded") {
  num::Rng rng(5);
  const ModelParams p = build_model(small_tcn(), 3);
  const Mat x = random_mat(rng, 12, 6);
  num::Rng r1(9), r2(9);
  const StageOutputs a = forward_mtms_tcn(p, x, true, &r1);
  const StageOutputs b = forward_mtms_tcn(p, x, true, &r2);
  CHECK(bits_equal(a.final_stage().step_logits, b.final_stage().step_logits));
  CHECK_FALSE(bits_equal(a.final_stage().step_logits, forward_mtms_tcn(p, x).final_stage().step_logits));
}

TEST_CASE("multi_task_loss") {
  const TcnConfig c = small_tcn();
  SUBCASE("uniform logits with the default ontology sizes") {
    TcnConfig d;
    d.input_dim = 4;
    d.layers_per_stage = 2;
    d.filters = 4;
    ModelParams p = build_model(d, 1);
    zero_all(p);
    num::Rng rng(2);
    const StageOutputs out = forward_mtms_tcn(p, random_mat(rng, 7, 4));
    const LossBreakdown l = multi_task_loss(out, random_labels(rng, 7, 11), random_labels(rng, 7, 44));
    CHECK(l.l_total == doctest::Approx(2.0 * (std::log(11.0) + std::log(44.0))).epsilon(1e-13));
    CHECK(l.per_stage.size() == 2);
  }
  SUBCASE("saturated correct logits give ~0") {
    StageOutputs out;
    Mat pl = Mat::Constant(3, 3, -50.0), sl = Mat::Constant(3, 5, -50.0);
    const std::vector<int> yp{0, 2, 1}, ys{4, 0, 3};
    for (int t = 0; t < 3; ++t) {
      pl(t, yp[static_cast<std::size_t>(t)]) = 50.0;
      sl(t, ys[static_cast<std::size_t>(t)]) = 50.0;
    }
    out.stages.push_back(finish_stage(pl, sl));
    CHECK(multi_task_loss(out, yp, ys).l_total < 1e-40);
  }
  SUBCASE("decomposition and single-task") {
    num::Rng rng(3);
    const ModelParams p = build_model(c, 4);
    const StageOutputs out = forward_mtms_tcn(p, random_mat(rng, 10, 6));
    const auto yp = random_labels(rng, 10, 3), ys = random_labels(rng, 10, 5);
    const LossBreakdown l = multi_task_loss(out, yp, ys);
    double sum = 0, sp = 0;
    for (const auto& s : l.per_stage) {
      sum += s.phase + s.step;
      sp += s.phase;
      CHECK(s.phase >= 0);
      CHECK(s.step >= 0);
    }
    CHECK(std::abs(l.l_total - sum) < 1e-12);
    CHECK(std::abs(l.l_phase - sp) < 1e-12);
    CHECK(std::abs(l.l_total - l.l_phase - l.l_step) < 1e-12);

    TcnConfig single = c;
    single.multi_task = false;
    const StageOutputs so = forward_mtms_tcn(build_model(single, 4), random_mat(rng, 10, 6));
    const LossBreakdown ls = multi_task_loss(so, yp, ys);
    CHECK(ls.l_step == 0.0);
    CHECK(ls.l_total == doctest::Approx(ls.per_stage[0].phase + ls.per_stage[1].phase).epsilon(1e-15));

    auto bad = yp;
    bad[3] = 3;
    CHECK_THROWS_AS(multi_task_loss(out, bad, ys), InvalidArgument);
    CHECK_THROWS_AS(multi_task_loss(out, std::vector<int>(9, 0), ys), InvalidArgument);
  }
  SUBCASE("recorded loss equals the offline loss") {
    num::Rng rng(4);
    const ModelParams p = build_model(c, 5);
    const Mat x = random_mat(rng, 11, 6);
    const auto yp = random_labels(rng, 11, 3), ys = random_labels(rng, 11, 5);
    num::GradientTape tape;
    const RecordedLoss r = record_multi_task_loss(tape, record_forward(tape, p, x), yp, ys);
    const LossBreakdown l = multi_task_loss(forward_mtms_tcn(p, x), yp, ys);
    CHECK(tape.value(r.total)(0, 0) == doctest::Approx(l.l_total).epsilon(1e-14));
    CHECK(r.breakdown.l_total == doctest::Approx(l.l_total).epsilon(1e-14));
  }
}

TEST_CASE("receptive_field") {
  TcnConfig c;
  c.num_stages = 1;
  CHECK(receptive_field(c) == 2047);
  c.num_stages = 2;
  CHECK(receptive_field(c) == 4093);
  c.kernel = 1;
  CHECK(receptive_field(c) == 1);
  c.arch = Architecture::framewise;
  CHECK(receptive_field(c) == 1);
  c.arch = Architecture::lstm;
  CHECK_THROWS_AS(receptive_field(c), InvalidArgument);
}

TEST_CASE("empirical receptive field matches the formula") {
  for (int stages : {1, 2}) {
    CAPTURE(stages);
    TcnConfig c = small_tcn(stages, 3);
    const long rf = receptive_field(c);
    CHECK(rf == 1 + stages * 2 * 7);
    const ModelParams p = build_model(c, 17);
    num::Rng rng(6);
    const Eigen::Index t = 2 * rf + 5;
    const Mat x = random_mat(rng, t + 1, 6);
    const Mat base = forward(p, x).final_stage().step_logits;
    auto changed = [&](long offset) {
      Mat y = x;
      y.row(t - offset).array() += 5.0;
      return (forward(p, y).final_stage().step_logits.row(t).array() != base.row(t).array()).any();
    };
    CHECK_FALSE(changed(rf));
    CHECK_FALSE(changed(rf + 1));
    CHECK(changed(rf - 1));
    CHECK(changed(0));
  }
}

TEST_CASE("framewise baseline") {
  num::Rng rng(7);
  const TcnConfig c = small_baseline(Architecture::framewise);
  ModelParams p = build_model(c, 2);
  CHECK(p.hidden->in_channels() == 6);
  CHECK(p.hidden->out_channels() == 7);
  const Mat x = random_mat(rng, 10, 6);
  const StageOutputs a = forward_framewise(p, x);
  Mat perm(10, 6);
  for (int t = 0; t < 10; ++t) perm.row(t) = x.row(9 - t);
  const StageOutputs b = forward_framewise(p, perm);
  for (int t = 0; t < 10; ++t) {
    CHECK((a.final_stage().phase_logits.row(t).array() == b.final_stage().phase_logits.row(9 - t).array()).all());
  }
  CHECK_THROWS_AS(forward_framewise(p, random_mat(rng, 3, 4)), InvalidArgument);
  CHECK_THROWS_AS(forward_framewise(build_model(small_tcn(), 0), x), InvalidArgument);

  zero_all(p);
  const StageOutputs z = forward_framewise(p, x);
  CHECK(uniform_rows(z.final_stage().phase_probs));
  CHECK(uniform_rows(z.final_stage().step_probs));

  // Two-class toy with class weights [2, 1]: (2 ln 2 + ln 2) / 2.
  TcnConfig toy = c;
  toy.num_phases = 2;
  toy.multi_task = false;
  ModelParams tp = build_model(toy, 0);
  zero_all(tp);
  LossWeights w;
  w.phase = std::vector<double>{2.0, 1.0};
  const LossBreakdown l = multi_task_loss(forward_framewise(tp, random_mat(rng, 2, 6)), std::vector<int>{0, 1},
                                          std::vector<int>{0, 0}, w);
  CHECK(l.l_total == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("lstm baseline") {
  num::Rng rng(8);
  const TcnConfig c = small_baseline(Architecture::lstm);
  ModelParams p = build_model(c, 2);
  CHECK(p.lstm->hidden() == 6);
  const Mat x = random_mat(rng, 40, 6);
  const StageOutputs a = forward_lstm(p, x);
  for (int t : {0, 10, 39}) {
    Mat y = x;
    y.bottomRows(40 - t - 1) = random_mat(rng, 40 - t - 1, 6);
    CHECK(rows_bits_equal(forward_lstm(p, y).final_stage().step_logits, a.final_stage().step_logits, t + 1));
  }
  zero_all(p);
  const StageOutputs z = forward_lstm(p, x);
  CHECK(uniform_rows(z.final_stage().phase_probs));
  CHECK(uniform_rows(z.final_stage().step_probs));
  CHECK_THROWS_AS(forward_lstm(p, random_mat(rng, 3, 2)), InvalidArgument);
}

TEST_CASE("full-model gradients match finite differences") {
  num::Rng rng(10);
  struct Case {
    const char* name;
    TcnConfig config;
    bool training;
    Eigen::Index frames;
  };
  TcnConfig single = small_tcn(2, 3);
  single.multi_task = false;
  single.task = Task::step;
  const std::vector<Case> cases{{"mtms_tcn", small_tcn(2, 3), false, 16},
                                {"mtms_tcn dropout", small_tcn(2, 3), true, 16},
                                {"single-task tcn", single, false, 12},
                                {"lstm", small_baseline(Architecture::lstm), false, 10},
                                {"lstm single frame", small_baseline(Architecture::lstm), false, 1},
                                {"framewise", small_baseline(Architecture::framewise), false, 8}};
  for (const Case& k : cases) {
    CAPTURE(k.name);
    const ModelParams p = build_model(k.config, 99);
    const Mat x = random_mat(rng, k.frames, 6);
    const auto yp = random_labels(rng, k.frames, 3), ys = random_labels(rng, k.frames, 5);
    std::vector<Mat> values;
    for_each_param(p, [&](const Mat& m) { values.push_back(m); });
    const num::LossBuilder build = [&](num::GradientTape& tape, const std::vector<Mat>& v) {
      ModelParams q = p;
      const auto refs = param_refs(q);
      for (std::size_t i = 0; i < refs.size(); ++i) *refs[i] = v[i];
      num::Rng masks(4);
      const auto heads = record_forward(tape, q, x, {k.training, &masks});
      return record_multi_task_loss(tape, heads, yp, ys).total;
    };
    CHECK(num::gradcheck(build, values).max_rel_error < 1e-4);
  }
}

TEST_CASE("online inference equals the offline forward pass") {
  num::Rng rng(11);
  const std::vector<TcnConfig> configs{small_tcn(), small_tcn(1, 5), small_baseline(Architecture::lstm),
                                       small_baseline(Architecture::framewise)};
  for (const TcnConfig& c : configs) {
    CAPTURE(to_string(c.arch));
    const ModelParams p = build_model(c, 12);
    const Mat x = random_mat(rng, 30, 6);
    const StageOutput off = forward(p, x).final_stage();
    const auto online = predict_online(p, x);
    REQUIRE(online.size() == 30);
    for (int t = 0; t < 30; ++t) {
      const auto& f = online[static_cast<std::size_t>(t)];
      CHECK(f.phase_label == off.phase_labels[static_cast<std::size_t>(t)]);
      CHECK(f.step_label == off.step_labels[static_cast<std::size_t>(t)]);
      CHECK(bits_equal(f.phase_probs, Mat(off.phase_probs.row(t))));
      CHECK(bits_equal(f.step_probs, Mat(off.step_probs.row(t))));
    }
  }
}

TEST_CASE("online sessions") {
  num::Rng rng(13);
  TcnConfig c = small_tcn();
  c.multi_task = false;
  const ModelParams p = build_model(c, 1);
  SUBCASE("first frame is defined") {
    OnlineSession s(p);
    const Mat x = random_mat(rng, 1, 6);
    const FramePrediction f = s.push(std::span<const double>(x.data(), 6));
    CHECK(f.phase_label >= 0);
    CHECK(f.step_label == -1);
    CHECK(f.step_probs.size() == 0);
    CHECK(bits_equal(f.phase_probs, forward(p, x).final_stage().phase_probs));
    CHECK(s.frames_seen() == 1);
  }
  SUBCASE("interleaved streams keep separate state") {
    const Mat a = random_mat(rng, 25, 6), b = random_mat(rng, 25, 6);
    OnlineSession sa(p), sb(p);
    const StageOutput oa = forward(p, a).final_stage(), ob = forward(p, b).final_stage();
    for (int t = 0; t < 25; ++t) {
      const FramePrediction fb = sb.push(std::span<const double>(b.row(t).data(), 6));
      const FramePrediction fa = sa.push(std::span<const double>(a.row(t).data(), 6));
      CHECK(bits_equal(fa.phase_probs, Mat(oa.phase_probs.row(t))));
      CHECK(bits_equal(fb.phase_probs, Mat(ob.phase_probs.row(t))));
    }
  }
  SUBCASE("bad frames") {
    OnlineSession s(p);
    const std::vector<double> short_row(5, 0.0);
    CHECK_THROWS_AS(s.push(short_row), InvalidArgument);
    std::vector<double> nan_row(6, 0.0);
    nan_row[2] = std::nan("");
    CHECK_THROWS_AS(s.push(nan_row), NumericError);
  }
}

TEST_CASE("train_temporal bookkeeping and determinism") {
  const data::Dataset videos = tiny_dataset(3, 6, 2);
  const data::Dataset train(videos.begin(), videos.begin() + 2), val(videos.begin() + 2, videos.end());
  TcnConfig c = small_tcn(2, 2);
  TrainConfig t;
  t.epochs = 1;
  t.seed = 5;
  const TrainResult one = train_temporal(train, val, c, t);
  CHECK(one.history.optimizer_steps == 2);
  CHECK(one.history.epochs.size() == 1);
  CHECK(one.history.best_epoch == 1);

  t.epochs = 3;
  const TrainResult a = train_temporal(train, val, c, t);
  const TrainResult b = train_temporal(train, val, c, t);
  REQUIRE(a.history.epochs.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(a.history.epochs[e].train_loss == b.history.epochs[e].train_loss);
    CHECK(a.history.epochs[e].val_score == b.history.epochs[e].val_score);
  }
  CHECK(bits_equal(a.params.stages[1].heads.step->weight, b.params.stages[1].heads.step->weight));
  CHECK(a.history.optimizer_steps == 6);

  TcnConfig fw = small_baseline(Architecture::framewise);
  t.framewise_epochs = 2;
  CHECK(train_temporal(train, val, fw, t).history.optimizer_steps == 4);

  CHECK_THROWS_AS(train_temporal({}, val, c, t), InvalidArgument);
  CHECK_THROWS_AS(train_temporal(train, {}, c, t), InvalidArgument);
  c.input_dim = 7;
  CHECK_THROWS_AS(train_temporal(train, val, c, t), InvalidArgument);
}

TEST_CASE("train_temporal reports divergence with the epoch") {
  const data::Dataset videos = tiny_dataset(2, 6, 3);
  const data::Dataset train(videos.begin(), videos.begin() + 1), val(videos.begin() + 1, videos.end());
  TrainConfig t;
  t.epochs = 50;
  t.lr = 1e300;
  try {
    train_temporal(train, val, small_tcn(1, 2), t);
    FAIL("expected divergence");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("selection_score") {
  TcnConfig c;
  const TaskAccuracy acc{0.6, 0.8};
  CHECK(selection_score(c, acc, SelectionMetric::mean_acc) == doctest::Approx(0.7));
  CHECK(selection_score(c, acc, SelectionMetric::phase_acc) == 0.6);
  c.multi_task = false;
  c.task = Task::step;
  CHECK(selection_score(c, acc, SelectionMetric::phase_acc) == 0.8);
}

TEST_CASE("checkpoint round trip") {
  const std::vector<TcnConfig> configs{small_tcn(), small_baseline(Architecture::lstm),
                                       small_baseline(Architecture::framewise)};
  const auto dir = std::filesystem::temp_directory_path() / "mtms_ckpt";
  std::filesystem::create_directories(dir);
  std::uint64_t seed = 1;
  for (const TcnConfig& c : configs) {
    Checkpoint ck{build_model(c, seed), seed * 977, {{"epochs", 3}, {"note", "x"}}};
    const auto bytes = encode_checkpoint(ck);
    const Checkpoint back = decode_checkpoint(bytes);
    CHECK(back.seed == ck.seed);
    CHECK(back.metadata == ck.metadata);
    CHECK(back.params.config == c);
    CHECK(encode_checkpoint(back) == bytes);
    const std::string path = (dir / ("m" + std::to_string(seed) + ".ckpt")).string();
    write_checkpoint(ck, path);
    CHECK(encode_checkpoint(read_checkpoint(path)) == bytes);
    ++seed;
  }
  CHECK_THROWS_AS(read_checkpoint((dir / "missing.ckpt").string()), IoError);
}

TEST_CASE("checkpoint rejects damaged bytes") {
  const auto bytes = encode_checkpoint({build_model(small_tcn(1, 2), 1), 7, {}});
  auto offset_of = [](const std::vector<std::uint8_t>& b) -> long {
    try {
      decode_checkpoint(b);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(offset_of(magic) == 0);
  auto version = bytes;
  version[8] = 9;
  CHECK(offset_of(version) == 8);
  for (std::size_t cut : {std::size_t{4}, std::size_t{30}, bytes.size() - 3}) {
    CHECK(offset_of(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<long>(cut))) >= 0);
  }
  auto trailing = bytes;
  trailing.push_back(1);
  CHECK(offset_of(trailing) == static_cast<long>(bytes.size()));
  auto filters = bytes;
  filters[12 + 4 * 4] = 9;  // filters field: shapes no longer match the arrays
  CHECK(offset_of(filters) > 0);
}
