#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "mtms/data/sequence.hpp"

namespace mtms::data {

struct SyntheticStep {
  int step = 0;
  double dwell_mean = 10.0;  // frames
  double dwell_sd = 0.0;
  double skip_prob = 0.0;
};

struct SyntheticPhase {
  int phase = 0;
  double skip_prob = 0.0;
  std::vector<SyntheticStep> steps;  // in temporal order
};

// Semi-Markov left-to-right workflow. Each video walks `workflow` in order,
// skipping phases and steps with their skip probabilities, and holds each step
// for a sampled dwell time. Features are the step's cluster center plus
// Gaussian noise; the noise is moving-average smoothed over `smoothing` frames
// and rescaled so its per-dimension standard deviation stays `noise`.
struct SyntheticSpec {
  int num_phases = 0;
  int num_steps = 0;
  int feature_dim = 0;
  std::vector<SyntheticPhase> workflow;
  num::Mat centers;  // num_steps x feature_dim
  double noise = 0.0;
  int smoothing = 1;
  // Optional per-step dwell multipliers (mean and sd are both scaled).
  std::vector<double> imbalance;
  double fps = 1.0;

  // phase -> steps reachable from the workflow.
  std::map<int, std::set<int>> hierarchy() const;
};

void validate(const SyntheticSpec& spec);

Dataset generate_synthetic(const SyntheticSpec& spec, int num_videos, std::uint64_t seed);

// Knobs for make_workflow_spec.
struct WorkflowOptions {
  int num_phases = 11;
  int num_steps = 44;
  int feature_dim = 64;
  double dwell_mean = 30.0;
  double dwell_sd_ratio = 0.2;
  // Log-uniform spread of per-step dwell multipliers in [e^-imbalance, e^imbalance].
  double imbalance = 0.0;
  double phase_skip_prob = 0.0;
  double step_skip_prob = 0.0;
  double center_scale = 1.0;
  double noise = 0.1;
  int smoothing = 1;
  double fps = 1.0;
  std::uint64_t seed = 0;
};

// Steps are split into consecutive blocks, one block per phase, and every step
// gets a Gaussian cluster center of per-dimension scale `center_scale`.
SyntheticSpec make_workflow_spec(const WorkflowOptions& options);

// Smallest Euclidean distance between two distinct center rows.
double min_center_distance(const SyntheticSpec& spec);

}  // namespace mtms::data
