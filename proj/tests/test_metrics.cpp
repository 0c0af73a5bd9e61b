#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include "mtms/metrics/metrics.hpp"
#include "mtms/metrics/ribbon.hpp"
#include "mtms/num/random.hpp"

using namespace mtms;
using namespace mtms::metrics;

namespace {

LabelSequence random_labels(num::Rng& rng, std::size_t n, int classes) {
  LabelSequence v(n);
  for (auto& y : v) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
  return v;
}

// Oracle on explicit frame-index sets.
struct OracleClass {
  bool excluded;
  double pr, re, f1;
  long support, predicted;
};

std::vector<OracleClass> oracle_prf(const LabelSequence& gt, const LabelSequence& pred, int classes) {
  std::vector<OracleClass> out;
  for (int c = 0; c < classes; ++c) {
    std::set<std::size_t> g, p, both;
    for (std::size_t t = 0; t < gt.size(); ++t) {
      if (gt[t] == c) g.insert(t);
      if (pred[t] == c) p.insert(t);
    }
    std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::inserter(both, both.begin()));
    OracleClass o{g.empty() && p.empty(), 0, 0, 0, static_cast<long>(g.size()), static_cast<long>(p.size())};
    if (!p.empty()) o.pr = static_cast<double>(both.size()) / static_cast<double>(p.size());
    if (!g.empty()) o.re = static_cast<double>(both.size()) / static_cast<double>(g.size());
    if (o.pr + o.re > 0) o.f1 = 2.0 * o.pr * o.re / (o.pr + o.re);
    out.push_back(o);
  }
  return out;
}

}  // namespace

TEST_CASE("frame_accuracy") {
  CHECK(frame_accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  CHECK(frame_accuracy({0, 0, 1, 1}, {0, 1, 1, 0}) == 0.5);
  CHECK_THROWS_AS(frame_accuracy({0, 1}, {0}), InvalidArgument);
  const std::vector<LabelSequence> gt{{0, 1}, {0, 0, 1, 1}};
  const std::vector<LabelSequence> pred{{0, 1}, {0, 1, 1, 0}};
  CHECK(dataset_accuracy(gt, pred) == 0.75);
  CHECK(dataset_accuracy(gt, pred, true) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("per_class_prf hand examples") {
  SUBCASE("perfect prediction") {
    const MetricsReport r = per_class_prf({0, 1, 2, 2}, {0, 1, 2, 2}, 3);
    for (const auto& c : r.per_class) {
      CHECK(c.pr == 1.0);
      CHECK(c.re == 1.0);
      CHECK(c.f1 == 1.0);
    }
    CHECK(r.macro_f1 == 1.0);
  }
  SUBCASE("gt [0,0,1], pred [0,1,1]") {
    const MetricsReport r = per_class_prf({0, 0, 1}, {0, 1, 1}, 2);
    CHECK(r.per_class[0].pr == 1.0);
    CHECK(r.per_class[0].re == 0.5);
    CHECK(r.per_class[1].pr == 0.5);
    CHECK(r.per_class[1].re == 1.0);
    CHECK(r.macro_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("absent class is excluded") {
    const MetricsReport r = per_class_prf({0, 0, 1}, {0, 1, 1}, 3);
    CHECK(r.excluded_classes == std::vector<int>{2});
    CHECK(r.macro_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("class never predicted has PR 0") {
    const MetricsReport r = per_class_prf({0, 1, 1}, {0, 0, 0}, 2);
    CHECK(r.per_class[1].pr == 0.0);
    CHECK(r.per_class[1].re == 0.0);
    CHECK(r.per_class[1].f1 == 0.0);
    CHECK(r.excluded_classes.empty());
  }
  CHECK_THROWS_AS(per_class_prf({0, 1}, {0}, 2), InvalidArgument);
  CHECK_THROWS_AS(per_class_prf({0, 2}, {0, 1}, 2), InvalidArgument);
}

TEST_CASE("per_class_prf equals the set oracle") {
  num::Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    const int classes = 1 + static_cast<int>(rng.below(8));
    const LabelSequence gt = random_labels(rng, n, classes);
    const LabelSequence pred = random_labels(rng, n, classes);
    const MetricsReport r = per_class_prf(gt, pred, classes);
    const auto o = oracle_prf(gt, pred, classes);
    double mp = 0, mr = 0, mf = 0;
    int included = 0;
    std::vector<int> excluded;
    for (int c = 0; c < classes; ++c) {
      const auto& oc = o[static_cast<std::size_t>(c)];
      const auto& rc = r.per_class[static_cast<std::size_t>(c)];
      CHECK(rc.support == oc.support);
      CHECK(rc.predicted_count == oc.predicted);
      if (oc.excluded) {
        excluded.push_back(c);
        continue;
      }
      CHECK(rc.pr == oc.pr);
      CHECK(rc.re == oc.re);
      CHECK(rc.f1 == oc.f1);
      mp += oc.pr;
      mr += oc.re;
      mf += oc.f1;
      ++included;
    }
    CHECK(r.excluded_classes == excluded);
    CHECK(r.macro_pr == mp / included);
    CHECK(r.macro_re == mr / included);
    CHECK(r.macro_f1 == mf / included);
  }
}

TEST_CASE("per_class_prf symmetry and relabelling invariance") {
  num::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const int classes = 2 + static_cast<int>(rng.below(6));
    const LabelSequence gt = random_labels(rng, n, classes);
    const LabelSequence pred = random_labels(rng, n, classes);
    const MetricsReport a = per_class_prf(gt, pred, classes);
    const MetricsReport b = per_class_prf(pred, gt, classes);
    for (int c = 0; c < classes; ++c) {
      CHECK(a.per_class[static_cast<std::size_t>(c)].pr == b.per_class[static_cast<std::size_t>(c)].re);
      CHECK(a.per_class[static_cast<std::size_t>(c)].re == b.per_class[static_cast<std::size_t>(c)].pr);
    }
    std::vector<int> perm(static_cast<std::size_t>(classes));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    LabelSequence g2 = gt, p2 = pred;
    for (auto& y : g2) y = perm[static_cast<std::size_t>(y)];
    for (auto& y : p2) y = perm[static_cast<std::size_t>(y)];
    const MetricsReport c = per_class_prf(g2, p2, classes);
    CHECK(c.macro_pr == doctest::Approx(a.macro_pr).epsilon(1e-14));
    CHECK(c.macro_re == doctest::Approx(a.macro_re).epsilon(1e-14));
    CHECK(c.macro_f1 == doctest::Approx(a.macro_f1).epsilon(1e-14));
    CHECK(c.accuracy == a.accuracy);
    for (auto& k : a.per_class) {
      CHECK(k.pr >= 0.0);
      CHECK(k.pr <= 1.0);
    }
  }
}

TEST_CASE("evaluate_videos pools PR/RE but averages accuracy per video") {
  const std::vector<LabelSequence> gt{{0, 0}, {1, 1, 1, 1}};
  const std::vector<LabelSequence> pred{{0, 1}, {1, 1, 1, 1}};
  const MetricsReport r = evaluate_videos(gt, pred, 2);
  CHECK(r.accuracy == 0.75);
  const MetricsReport pooled = per_class_prf({0, 0, 1, 1, 1, 1}, {0, 1, 1, 1, 1, 1}, 2);
  CHECK(r.macro_f1 == pooled.macro_f1);
  CHECK(r.per_class[1].pr == 0.8);
}

TEST_CASE("joint_accuracy") {
  CHECK(joint_accuracy({0, 1}, {0, 1}, {2, 3}, {2, 3}) == 1.0);
  // frames 1..4: phase right at 1,2,3; step right at 2,3,4.
  CHECK(joint_accuracy({0, 0, 0, 0}, {0, 0, 0, 1}, {1, 1, 1, 1}, {0, 1, 1, 1}) == 0.5);
  CHECK_THROWS_AS(joint_accuracy({0}, {0}, {0, 1}, {0, 1}), InvalidArgument);
  num::Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    const auto pg = random_labels(rng, n, 3), pp = random_labels(rng, n, 3);
    const auto sg = random_labels(rng, n, 4), sp = random_labels(rng, n, 4);
    const double j = joint_accuracy(pg, pp, sg, sp);
    CHECK(j >= 0.0);
    CHECK(j <= std::min(frame_accuracy(pg, pp), frame_accuracy(sg, sp)));
  }
  const std::vector<LabelSequence> pg{{0, 0}, {0, 0, 0, 0}}, pp{{0, 0}, {0, 0, 0, 1}};
  const std::vector<LabelSequence> sg{{1, 1}, {1, 1, 1, 1}}, sp{{1, 1}, {0, 1, 1, 1}};
  CHECK(dataset_joint_accuracy(pg, pp, sg, sp) == 0.75);
}

TEST_CASE("aggregate_folds") {
  auto report = [](double acc) {
    MetricsReport r;
    r.accuracy = acc;
    r.macro_f1 = acc / 2;
    return r;
  };
  const std::vector<MetricsReport> two{report(0.90), report(0.92)};
  const FoldAggregate a = aggregate_folds(two);
  CHECK(a.folds == 2);
  CHECK(a.accuracy.mean == doctest::Approx(0.91).epsilon(1e-14));
  CHECK(a.accuracy.std == doctest::Approx(0.0141421356237).epsilon(1e-9));
  const std::vector<MetricsReport> one{report(0.5)};
  CHECK(aggregate_folds(one).accuracy.std == 0.0);
  const std::vector<MetricsReport> same{report(0.7), report(0.7), report(0.7)};
  CHECK(aggregate_folds(same).accuracy.std == 0.0);
  CHECK_THROWS_AS(aggregate_folds(std::vector<MetricsReport>{}), InvalidArgument);

  num::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(2 + rng.below(6));
    for (auto& x : v) x = rng.uniform();
    const double shift = rng.uniform(-3, 3);
    std::vector<double> w = v;
    for (auto& x : w) x += shift;
    CHECK(mean_std(w).mean == doctest::Approx(mean_std(v).mean + shift).epsilon(1e-12));
    CHECK(mean_std(w).std == doctest::Approx(mean_std(v).std).epsilon(1e-9));
  }
}

TEST_CASE("report json keeps a stable key order") {
  const MetricsReport r = per_class_prf({0, 1}, {0, 0}, 3);
  const std::string s = to_json(r).dump();
  CHECK(s.find("\"accuracy\"") < s.find("\"macro_pr\""));
  CHECK(s.find("\"macro_f1\"") < s.find("\"per_class\""));
  CHECK(s == to_json(per_class_prf({0, 1}, {0, 0}, 3)).dump());
}

TEST_CASE("ribbon export") {
  const LabelSequence gt{0, 0, 1, 1, 1, 2};
  auto rects = [](const std::string& svg, const std::string& row) {
    const auto start = svg.find("data-name=\"" + row + "\"");
    const auto end = svg.find("</g>", start);
    std::vector<std::string> geometry;
    const std::regex rect(R"re(<rect x="([0-9.]+)" y="[0-9.]+" width="([0-9.]+)")re");
    const std::string body = svg.substr(start, end - start);
    for (auto it = std::sregex_iterator(body.begin(), body.end(), rect); it != std::sregex_iterator(); ++it) {
      geometry.push_back((*it)[1].str() + "/" + (*it)[2].str());
    }
    return geometry;
  };
  SUBCASE("identical rows have identical bars") {
    const std::string svg = export_ribbon(gt, {{"model", gt}}, {"a", "b", "c"});
    CHECK(rects(svg, "GT") == rects(svg, "model"));
    CHECK(rects(svg, "GT").size() == 3);
    CHECK(svg == export_ribbon(gt, {{"model", gt}}, {"a", "b", "c"}));
  }
  SUBCASE("colours wrap every 20 classes") {
    LabelSequence many(44);
    std::iota(many.begin(), many.end(), 0);
    const std::string svg = export_ribbon(many, {}, {});
    for (int c : {0, 7, 20, 27, 43}) {
      const std::string needle = "fill=\"" + ribbon_color(c % 20) + "\" data-class=\"" + std::to_string(c) + "\"";
      CHECK(svg.find(needle) != std::string::npos);
    }
    CHECK(ribbon_color(43) == ribbon_palette()[3]);
    CHECK(ribbon_palette().size() == 20);
  }
  SUBCASE("gt only") {
    const std::string svg = export_ribbon(gt, {}, {"a", "b", "c"}, {}, "seed 4");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<desc>seed 4</desc>") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '<') == std::count(svg.begin(), svg.end(), '>'));
  }
  SUBCASE("writes the file") {
    const auto path = std::filesystem::temp_directory_path() / "mtms_ribbon.svg";
    const std::string svg = export_ribbon(gt, {}, {}, path.string());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == svg);
  }
  CHECK_THROWS_AS(export_ribbon(gt, {{"m", {0, 1}}}, {}), InvalidArgument);
}
