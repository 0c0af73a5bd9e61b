#include "mtms/data/synthetic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mtms/num/random.hpp"

namespace mtms::data {

std::map<int, std::set<int>> SyntheticSpec::hierarchy() const {
  std::map<int, std::set<int>> h;
  for (const auto& phase : workflow) {
    auto& set = h[phase.phase];
    for (const auto& s : phase.steps) set.insert(s.step);
  }
  return h;
}

void validate(const SyntheticSpec& spec) {
  if (spec.num_phases < 1 || spec.num_steps < 1 || spec.feature_dim < 1) {
    throw InvalidArgument("synthetic spec: class counts and feature_dim must be positive");
  }
  if (spec.workflow.empty()) throw InvalidArgument("synthetic spec: empty workflow");
  for (const auto& phase : spec.workflow) {
    if (phase.phase < 0 || phase.phase >= spec.num_phases) throw InvalidArgument("synthetic spec: bad phase id");
    if (phase.steps.empty()) throw InvalidArgument("synthetic spec: phase without steps");
    if (!(phase.skip_prob >= 0.0 && phase.skip_prob < 1.0)) throw InvalidArgument("synthetic spec: bad skip prob");
    for (const auto& s : phase.steps) {
      if (s.step < 0 || s.step >= spec.num_steps) throw InvalidArgument("synthetic spec: bad step id");
      if (!(s.dwell_mean >= 1.0) || !(s.dwell_sd >= 0.0)) {
        throw InvalidArgument("synthetic spec: dwell mean must be >= 1 and sd >= 0");
      }
      if (!(s.skip_prob >= 0.0 && s.skip_prob < 1.0)) throw InvalidArgument("synthetic spec: bad skip prob");
    }
  }
  if (spec.centers.rows() != spec.num_steps || spec.centers.cols() != spec.feature_dim) {
    throw InvalidArgument("synthetic spec: centers must be num_steps x feature_dim");
  }
  if (!num::all_finite(spec.centers)) throw InvalidArgument("synthetic spec: non-finite centers");
  if (!(spec.noise >= 0.0)) throw InvalidArgument("synthetic spec: noise scale must be >= 0");
  if (spec.smoothing < 1) throw InvalidArgument("synthetic spec: smoothing window must be >= 1");
  if (!spec.imbalance.empty()) {
    if (static_cast<int>(spec.imbalance.size()) != spec.num_steps) {
      throw InvalidArgument("synthetic spec: imbalance profile needs one entry per step");
    }
    for (double m : spec.imbalance) {
      if (!(m > 0.0)) throw InvalidArgument("synthetic spec: imbalance multipliers must be positive");
    }
  }
  if (!(spec.fps > 0.0)) throw InvalidArgument("synthetic spec: fps must be positive");
}

namespace {

struct Segment {
  int phase;
  int step;
  int frames;
};

std::vector<Segment> sample_segments(const SyntheticSpec& spec, num::Rng& rng) {
  std::vector<Segment> segments;
  for (const auto& phase : spec.workflow) {
    if (rng.bernoulli(phase.skip_prob)) continue;
    for (const auto& s : phase.steps) {
      if (rng.bernoulli(s.skip_prob)) continue;
      const double mult = spec.imbalance.empty() ? 1.0 : spec.imbalance[static_cast<std::size_t>(s.step)];
      const double len = std::round(rng.normal(s.dwell_mean * mult, s.dwell_sd * mult));
      segments.push_back({phase.phase, s.step, static_cast<int>(std::max(1.0, len))});
    }
  }
  return segments;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec, int num_videos, std::uint64_t seed) {
  validate(spec);
  if (num_videos < 1) throw InvalidArgument("generate_synthetic: need at least one video");
  num::Rng rng(seed);
  Dataset out;
  for (int v = 0; v < num_videos; ++v) {
    std::vector<Segment> segments = sample_segments(spec, rng);
    // A video where every phase was skipped is redrawn.
    while (segments.empty()) segments = sample_segments(spec, rng);

    FeatureSequence seq;
    char id[32];
    std::snprintf(id, sizeof id, "video%03d", v + 1);
    seq.video_id = id;
    seq.fps = spec.fps;
    for (const auto& seg : segments) {
      seq.phase_labels.insert(seq.phase_labels.end(), static_cast<std::size_t>(seg.frames), seg.phase);
      seq.step_labels.insert(seq.step_labels.end(), static_cast<std::size_t>(seg.frames), seg.step);
    }
    const auto frames = static_cast<Eigen::Index>(seq.step_labels.size());
    const Eigen::Index dim = spec.feature_dim;

    num::Mat noise(frames, dim);
    for (Eigen::Index t = 0; t < frames; ++t)
      for (Eigen::Index d = 0; d < dim; ++d) noise(t, d) = rng.normal();
    if (spec.smoothing > 1) {
      const Eigen::Index half = spec.smoothing / 2;
      num::Mat smoothed(frames, dim);
      for (Eigen::Index t = 0; t < frames; ++t) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, t - half);
        const Eigen::Index hi = std::min<Eigen::Index>(frames, lo + spec.smoothing);
        const double n = static_cast<double>(hi - lo);
        smoothed.row(t) = noise.middleRows(lo, hi - lo).colwise().sum() / std::sqrt(n);
      }
      noise = std::move(smoothed);
    }

    seq.features.resize(frames, dim);
    for (Eigen::Index t = 0; t < frames; ++t) {
      const int step = seq.step_labels[static_cast<std::size_t>(t)];
      seq.features.row(t) = (spec.centers.row(step) + spec.noise * noise.row(t)).cast<float>();
    }
    out.push_back(std::move(seq));
  }
  return out;
}

SyntheticSpec make_workflow_spec(const WorkflowOptions& o) {
  if (o.num_phases < 1 || o.num_steps < o.num_phases) {
    throw InvalidArgument("make_workflow_spec: need at least one step per phase");
  }
  num::Rng rng(o.seed);
  SyntheticSpec spec;
  spec.num_phases = o.num_phases;
  spec.num_steps = o.num_steps;
  spec.feature_dim = o.feature_dim;
  spec.noise = o.noise;
  spec.smoothing = o.smoothing;
  spec.fps = o.fps;
  for (int p = 0; p < o.num_phases; ++p) {
    SyntheticPhase phase;
    phase.phase = p;
    phase.skip_prob = p == 0 ? 0.0 : o.phase_skip_prob;
    const int begin = p * o.num_steps / o.num_phases;
    const int end = (p + 1) * o.num_steps / o.num_phases;
    for (int s = begin; s < end; ++s) {
      phase.steps.push_back({s, o.dwell_mean, o.dwell_mean * o.dwell_sd_ratio, s == begin ? 0.0 : o.step_skip_prob});
    }
    spec.workflow.push_back(std::move(phase));
  }
  spec.centers.resize(o.num_steps, o.feature_dim);
  for (Eigen::Index s = 0; s < spec.centers.rows(); ++s)
    for (Eigen::Index d = 0; d < spec.centers.cols(); ++d) spec.centers(s, d) = o.center_scale * rng.normal();
  if (o.imbalance > 0.0) {
    for (int s = 0; s < o.num_steps; ++s) spec.imbalance.push_back(std::exp(rng.uniform(-o.imbalance, o.imbalance)));
  }
  return spec;
}

double min_center_distance(const SyntheticSpec& spec) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < spec.centers.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < spec.centers.rows(); ++b) {
      best = std::min(best, (spec.centers.row(a) - spec.centers.row(b)).norm());
    }
  }
  return best;
}

}  // namespace mtms::data
