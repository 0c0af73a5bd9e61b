#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "mtms/data/bytes.hpp"
#include "mtms/data/dataset_dir.hpp"
#include "mtms/data/folds.hpp"
#include "mtms/data/ontology.hpp"
#include "mtms/data/sequence.hpp"
#include "mtms/data/synthetic.hpp"
#include "mtms/data/weights.hpp"
#include "mtms/num/random.hpp"

using namespace mtms;
using namespace mtms::data;
namespace fs = std::filesystem;

namespace {

FeatureSequence random_sequence(num::Rng& rng, int frames, int dim, int phases = 11, int steps = 44) {
  FeatureSequence s;
  s.video_id = "v";
  s.features.resize(frames, dim);
  for (Eigen::Index i = 0; i < s.features.size(); ++i) s.features.data()[i] = static_cast<float>(rng.normal(0, 3));
  for (int t = 0; t < frames; ++t) {
    s.phase_labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(phases))));
    s.step_labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(steps))));
  }
  s.fps = static_cast<double>(1 + rng.below(50000)) / 1000.0;
  return s;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mtms_test_data_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("default ontology") {
  const Ontology o = default_ontology();
  CHECK(o.num_phases() == 11);
  CHECK(o.num_steps() == 44);
  CHECK(o.steps[0].code == "S0");
  CHECK(o.steps[0].name == "null step");
  CHECK(o.phases[0].code == "P1");
  CHECK(o.hierarchy.empty());
  std::set<std::string> critical;
  for (const auto& c : o.phases)
    if (c.critical) critical.insert(c.code);
  for (const auto& c : o.steps)
    if (c.critical) critical.insert(c.code);
  const std::set<std::string> want{"P2", "P4", "P5", "P8", "S4",  "S5",  "S6",  "S7",  "S8",
                                   "S16", "S18", "S25", "S30", "S32", "S39"};
  CHECK(critical == want);
  CHECK_NOTHROW(validate(o));
  CHECK(o.allows(3, 40));
}

TEST_CASE("ontology json round trip and validation") {
  Ontology o = default_ontology();
  o.hierarchy[0] = {};
  for (int s = 0; s < 44; ++s) o.hierarchy[s % 11].insert(s);
  const Ontology back = ontology_from_json(nlohmann::json::parse(to_json(o).dump()));
  CHECK(to_json(back).dump() == to_json(o).dump());
  CHECK(back.allows(0, 11));
  CHECK_FALSE(back.allows(0, 1));

  Ontology missing = o;
  missing.hierarchy[0].erase(0);
  CHECK_THROWS_AS(validate(missing), InvalidArgument);
  Ontology sparse = default_ontology();
  sparse.phases[3].id = 7;
  CHECK_THROWS_AS(validate(sparse), InvalidArgument);
}

TEST_CASE("median_frequency_weights") {
  SUBCASE("frequencies 0.5, 0.3, 0.2") {
    const std::vector<std::vector<int>> seqs{{0, 0, 0, 0, 0, 1, 1, 1, 2, 2}};
    const ClassWeights w = median_frequency_weights(seqs, 3);
    CHECK(w.weights == std::vector<double>{0.6, 1.0, 1.5});
    CHECK(w.absent.empty());
  }
  SUBCASE("counts pool across sequences") {
    const std::vector<std::vector<int>> seqs{{0, 0, 1}, {0, 0, 0, 1, 1, 2, 2}};
    CHECK(median_frequency_weights(seqs, 3).weights == std::vector<double>{0.6, 1.0, 1.5});
  }
  SUBCASE("uniform frequencies") {
    const std::vector<std::vector<int>> seqs{{0, 1, 2, 3, 3, 2, 1, 0}};
    CHECK(median_frequency_weights(seqs, 4).weights == std::vector<double>(4, 1.0));
  }
  SUBCASE("one absent class") {
    // present frequencies 4/6 and 2/6, median 3/6
    const std::vector<std::vector<int>> seqs{{0, 0, 0, 0, 2, 2}};
    const ClassWeights w = median_frequency_weights(seqs, 3);
    CHECK(w.weights[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w.weights[1] == 0.0);
    CHECK(w.weights[2] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(w.absent == std::vector<int>{1});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(median_frequency_weights(std::vector<std::vector<int>>{}, 3), InvalidArgument);
    CHECK_THROWS_AS(median_frequency_weights(std::vector<std::vector<int>>{{0, 3}}, 3), InvalidArgument);
  }
}

TEST_CASE("median_frequency_weights properties on random counts") {
  num::Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int classes = 1 + 2 * static_cast<int>(rng.below(6));  // odd: a median class exists
    std::vector<int> labels;
    std::vector<long> counts(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
      counts[static_cast<std::size_t>(c)] = 1 + static_cast<long>(rng.below(500));
      labels.insert(labels.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(c)]), c);
    }
    rng.shuffle(labels);
    const std::vector<std::vector<int>> seqs{labels};
    const ClassWeights w = median_frequency_weights(seqs, classes);
    std::vector<long> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    const long median = sorted[sorted.size() / 2];
    for (int a = 0; a < classes; ++a) {
      if (counts[static_cast<std::size_t>(a)] == median) CHECK(w.weights[static_cast<std::size_t>(a)] == 1.0);
      for (int b = 0; b < classes; ++b) {
        if (counts[static_cast<std::size_t>(a)] < counts[static_cast<std::size_t>(b)]) {
          CHECK(w.weights[static_cast<std::size_t>(a)] > w.weights[static_cast<std::size_t>(b)]);
        }
      }
    }
  }
}

TEST_CASE("kfold_split sizes") {
  std::vector<std::string> ids;
  for (int i = 0; i < 40; ++i) ids.push_back("v" + std::to_string(i));
  const FoldPlan plan = kfold_split(ids, 4, 6, 1);
  REQUIRE(plan.folds.size() == 4);
  for (const Fold& f : plan.folds) {
    CHECK(f.test.size() == 10);
    CHECK(f.train.size() == 24);
    CHECK(f.val.size() == 6);
  }
  const std::vector<std::string> eight(ids.begin(), ids.begin() + 8);
  for (const Fold& f : kfold_split(eight, 4, 1, 3).folds) {
    CHECK(f.test.size() == 2);
    CHECK(f.train.size() == 5);
    CHECK(f.val.size() == 1);
  }
  CHECK(kfold_split(ids, 4, 6, 1).folds[2].val == plan.folds[2].val);
  CHECK_THROWS_AS(kfold_split(eight, 9, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(kfold_split(eight, 1, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(kfold_split(eight, 4, 6, 0), InvalidArgument);
}

TEST_CASE("kfold_split partition property") {
  num::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(40));
    const int k = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const int largest = (n + k - 1) / k;
    if (n - largest < 1) continue;
    const int val = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - largest)));
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("id" + std::to_string(i));
    const FoldPlan plan = kfold_split(ids, k, val, rng.next_u64());
    std::multiset<std::string> tested;
    for (const Fold& f : plan.folds) {
      tested.insert(f.test.begin(), f.test.end());
      CHECK(static_cast<int>(f.val.size()) == val);
      const auto te = as_set(f.test), tr = as_set(f.train), va = as_set(f.val);
      CHECK(te.size() + tr.size() + va.size() == static_cast<std::size_t>(n));
      std::set<std::string> all = te;
      all.insert(tr.begin(), tr.end());
      all.insert(va.begin(), va.end());
      CHECK(all.size() == static_cast<std::size_t>(n));
      CHECK(f.test.size() + 1 >= static_cast<std::size_t>(n / k));
      CHECK(f.test.size() <= static_cast<std::size_t>(largest));
    }
    CHECK(tested.size() == static_cast<std::size_t>(n));
    CHECK(std::set<std::string>(tested.begin(), tested.end()).size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("subsample") {
  num::Rng rng(2);
  FeatureSequence s = random_sequence(rng, 10, 3);
  s.fps = 25.0;
  CHECK(subsample(s, 1) == s);
  const FeatureSequence t = subsample(s, 3);
  REQUIRE(t.frames() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(t.features.row(i) == s.features.row(3 * i));
    CHECK(t.phase_labels[static_cast<std::size_t>(i)] == s.phase_labels[static_cast<std::size_t>(3 * i)]);
    CHECK(t.step_labels[static_cast<std::size_t>(i)] == s.step_labels[static_cast<std::size_t>(3 * i)]);
  }
  CHECK(subsample(s, 25).fps == 1.0);
  CHECK(subsample(s, 25).frames() == 1);
  CHECK_THROWS_AS(subsample(s, 0), InvalidArgument);
}

TEST_CASE("subsample composes") {
  num::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    FeatureSequence s = random_sequence(rng, 1 + static_cast<int>(rng.below(80)), 2);
    s.fps = 60.0;
    const int a = 1 + static_cast<int>(rng.below(5)), b = 1 + static_cast<int>(rng.below(5));
    const FeatureSequence once = subsample(s, a * b);
    const FeatureSequence twice = subsample(subsample(s, a), b);
    CHECK(once.features == twice.features);
    CHECK(once.phase_labels == twice.phase_labels);
    CHECK(once.step_labels == twice.step_labels);
    CHECK(once.fps == doctest::Approx(twice.fps).epsilon(1e-15));
  }
}

TEST_CASE("sequence format round trip on random contents") {
  num::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    FeatureSequence s = random_sequence(rng, 1 + static_cast<int>(rng.below(60)), 1 + static_cast<int>(rng.below(20)));
    const std::vector<std::uint8_t> bytes = encode_sequence(s);
    CHECK(bytes.size() == 20 + 4 * s.features.size() + 4 * static_cast<std::size_t>(s.frames()));
    const FeatureSequence back = decode_sequence(bytes, s.video_id);
    CHECK(back == s);
    CHECK(encode_sequence(back) == bytes);
  }
  const fs::path dir = scratch("fseq");
  FeatureSequence s = random_sequence(rng, 7, 5);
  s.video_id = "case12";
  write_sequence(s, (dir / "case12.fseq").string());
  CHECK(read_sequence((dir / "case12.fseq").string()) == s);
  CHECK_THROWS_AS(read_sequence((dir / "missing.fseq").string()), IoError);
}

TEST_CASE("sequence format rejects damaged input") {
  num::Rng rng(3);
  const FeatureSequence s = random_sequence(rng, 4, 3);
  const std::vector<std::uint8_t> good = encode_sequence(s);

  auto offset_of = [](const std::vector<std::uint8_t>& b) -> long {
    try {
      decode_sequence(b);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  std::vector<std::uint8_t> magic = good;
  magic[1] = 'X';
  CHECK(offset_of(magic) == 0);
  std::vector<std::uint8_t> version = good;
  version[4] = 2;
  CHECK(offset_of(version) == 4);
  for (std::size_t cut : {std::size_t{2}, std::size_t{10}, good.size() - 1}) {
    CAPTURE(cut);
    const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + static_cast<long>(cut));
    CHECK(offset_of(truncated) >= 0);
  }
  std::vector<std::uint8_t> trailing = good;
  trailing.push_back(0);
  CHECK(offset_of(trailing) == static_cast<long>(good.size()));
  std::vector<std::uint8_t> zero_t = good;
  zero_t[8] = zero_t[9] = zero_t[10] = zero_t[11] = 0;
  CHECK(offset_of(zero_t) == 8);
  std::vector<std::uint8_t> nan = good;
  nan[20] = 0x00, nan[21] = 0x00, nan[22] = 0xc0, nan[23] = 0x7f;
  CHECK(offset_of(nan) == 20);

  FeatureSequence empty = s;
  empty.features.resize(0, 3);
  empty.phase_labels.clear();
  empty.step_labels.clear();
  CHECK_THROWS_AS(encode_sequence(empty), InvalidArgument);
  FeatureSequence ragged = s;
  ragged.step_labels.pop_back();
  CHECK_THROWS_AS(encode_sequence(ragged), InvalidArgument);
}

TEST_CASE("synthetic generator") {
  WorkflowOptions o;
  o.num_phases = 4;
  o.num_steps = 10;
  o.feature_dim = 8;
  o.dwell_mean = 6;
  o.phase_skip_prob = 0.3;
  o.step_skip_prob = 0.3;
  o.seed = 5;
  SUBCASE("labels follow the hierarchy and generation is deterministic") {
    const SyntheticSpec spec = make_workflow_spec(o);
    const auto h = spec.hierarchy();
    const Dataset a = generate_synthetic(spec, 12, 9);
    CHECK(a == generate_synthetic(spec, 12, 9));
    CHECK_FALSE(a == generate_synthetic(spec, 12, 10));
    for (const auto& v : a) {
      CHECK_NOTHROW(validate(v, 4, 10));
      for (std::size_t t = 0; t < v.step_labels.size(); ++t) {
        CHECK(h.at(v.phase_labels[t]).count(v.step_labels[t]) == 1);
      }
      // left to right
      CHECK(std::is_sorted(v.phase_labels.begin(), v.phase_labels.end()));
      CHECK(std::is_sorted(v.step_labels.begin(), v.step_labels.end()));
    }
    std::set<int> covered;
    for (const auto& [p, steps] : h) covered.insert(steps.begin(), steps.end());
    CHECK(covered.size() == 10);
  }
  SUBCASE("zero noise is separable by nearest centroid") {
    o.noise = 0.0;
    o.smoothing = 5;
    const SyntheticSpec spec = make_workflow_spec(o);
    REQUIRE(min_center_distance(spec) > 0.0);
    long correct = 0, total = 0;
    for (const auto& v : generate_synthetic(spec, 6, 1)) {
      for (Eigen::Index t = 0; t < v.frames(); ++t) {
        Eigen::Index best = 0;
        (spec.centers.rowwise() - v.features.row(t).cast<double>()).rowwise().squaredNorm().minCoeff(&best);
        correct += best == v.step_labels[static_cast<std::size_t>(t)];
        ++total;
      }
    }
    CHECK(correct == total);
  }
  SUBCASE("smoothing keeps the noise scale") {
    o.noise = 1.0;
    o.smoothing = 9;
    o.dwell_mean = 200;
    const SyntheticSpec spec = make_workflow_spec(o);
    double sq = 0;
    long n = 0;
    for (const auto& v : generate_synthetic(spec, 3, 2)) {
      for (Eigen::Index t = 0; t < v.frames(); ++t) {
        sq += (v.features.row(t).cast<double>() - spec.centers.row(v.step_labels[static_cast<std::size_t>(t)]))
                  .squaredNorm();
        n += v.dim();
      }
    }
    CHECK(std::sqrt(sq / static_cast<double>(n)) == doctest::Approx(1.0).epsilon(0.1));
  }
  SUBCASE("invalid specs") {
    SyntheticSpec spec = make_workflow_spec(o);
    spec.noise = -1;
    CHECK_THROWS_AS(generate_synthetic(spec, 1, 0), InvalidArgument);
    spec = make_workflow_spec(o);
    spec.workflow[0].steps[0].dwell_mean = 0.5;
    CHECK_THROWS_AS(generate_synthetic(spec, 1, 0), InvalidArgument);
    spec = make_workflow_spec(o);
    spec.workflow[1].steps[0].step = 0;  // step claimed by two phases' lists
    CHECK_NOTHROW(validate(spec));
    CHECK_THROWS_AS(generate_synthetic(make_workflow_spec(o), 0, 0), InvalidArgument);
  }
}

TEST_CASE("synthetic class durations are monotone in the dwell multipliers") {
  SyntheticSpec spec;
  spec.num_phases = 1;
  spec.num_steps = 4;
  spec.feature_dim = 2;
  spec.centers = num::Mat::Zero(4, 2);
  spec.noise = 0.1;
  spec.workflow = {{0, 0.0, {{0, 10, 2, 0}, {1, 10, 2, 0}, {2, 10, 2, 0}, {3, 10, 2, 0}}}};
  spec.imbalance = {4.0, 1.0, 0.5, 2.0};
  std::vector<long> frames(4, 0);
  for (const auto& v : generate_synthetic(spec, 20, 3))
    for (int s : v.step_labels) ++frames[static_cast<std::size_t>(s)];
  CHECK(frames[2] < frames[1]);
  CHECK(frames[1] < frames[3]);
  CHECK(frames[3] < frames[0]);

  // Same property on the generated profile: rank order agrees for every pair of
  // steps whose multipliers differ by at least 50%.
  WorkflowOptions o;
  o.imbalance = 1.5;
  o.seed = 2;
  o.feature_dim = 4;
  const SyntheticSpec big = make_workflow_spec(o);
  std::vector<long> counts(44, 0);
  for (const auto& v : generate_synthetic(big, 20, 4))
    for (int s : v.step_labels) ++counts[static_cast<std::size_t>(s)];
  for (int a = 0; a < 44; ++a) {
    for (int b = 0; b < 44; ++b) {
      if (big.imbalance[static_cast<std::size_t>(a)] > 1.5 * big.imbalance[static_cast<std::size_t>(b)]) {
        CHECK(counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)]);
      }
    }
  }
}

TEST_CASE("dataset directory round trip") {
  WorkflowOptions o;
  o.num_phases = 3;
  o.num_steps = 6;
  o.feature_dim = 5;
  const Dataset videos = generate_synthetic(make_workflow_spec(o), 3, 1);
  const fs::path dir = scratch("dir");
  nlohmann::ordered_json prov{{"seed", 1}};
  Ontology ont = default_ontology();
  write_dataset(dir.string(), videos, ont, prov);
  const LoadedDataset back = read_dataset(dir.string());
  CHECK(back.videos == videos);
  CHECK(back.manifest.video_ids.size() == 3);
  CHECK(back.manifest.feature_dim == 5);
  CHECK(back.manifest.provenance == prov);
  CHECK(to_json(back.ontology) == to_json(ont));
  const Dataset picked = select(back.videos, {videos[2].video_id, videos[0].video_id});
  CHECK(picked[0] == videos[2]);
  CHECK_THROWS_AS(select(back.videos, {"nope"}), InvalidArgument);
  CHECK_THROWS_AS(read_dataset((dir / "absent").string()), IoError);

  std::ofstream(dir / "manifest.json") << "{ not json";
  CHECK_THROWS_AS(read_dataset(dir.string()), ParseError);
}
