#pragma once

#include <span>
#include <vector>

namespace mtms::data {

struct ClassWeights {
  std::vector<double> weights;
  std::vector<int> absent;  // classes with no frames; their weight is 0
};

// Median frequency balancing over per-frame counts pooled across all
// sequences: w_c = median(freq) / freq_c, taken over the classes present.
ClassWeights median_frequency_weights(std::span<const std::vector<int>> label_sequences, int num_classes);

}  // namespace mtms::data
