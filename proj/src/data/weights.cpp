#include "mtms/data/weights.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "mtms/num/errors.hpp"

namespace mtms::data {

ClassWeights median_frequency_weights(std::span<const std::vector<int>> label_sequences, int num_classes) {
  if (num_classes < 1) throw InvalidArgument("median_frequency_weights: need at least one class");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes), 0);
  std::int64_t total = 0;
  for (const auto& seq : label_sequences) {
    for (int y : seq) {
      if (y < 0 || y >= num_classes) {
        throw InvalidArgument("median_frequency_weights: label " + std::to_string(y) + " out of range");
      }
      ++counts[static_cast<std::size_t>(y)];
      ++total;
    }
  }
  if (total == 0) throw InvalidArgument("median_frequency_weights: no frames");

  // Frequencies share the denominator `total`, so ratios of counts give the
  // same weights with a single rounding each.
  std::vector<std::int64_t> present;
  for (std::int64_t c : counts) {
    if (c > 0) present.push_back(c);
  }
  std::sort(present.begin(), present.end());
  const std::size_t n = present.size();
  // median = twice_median / 2, kept as an integer numerator.
  const std::int64_t twice_median = n % 2 == 1 ? 2 * present[n / 2] : present[n / 2 - 1] + present[n / 2];

  ClassWeights out;
  out.weights.assign(static_cast<std::size_t>(num_classes), 0.0);
  for (int c = 0; c < num_classes; ++c) {
    const std::int64_t count = counts[static_cast<std::size_t>(c)];
    if (count == 0) {
      out.absent.push_back(c);
      continue;
    }
    out.weights[static_cast<std::size_t>(c)] = static_cast<double>(twice_median) / static_cast<double>(2 * count);
  }
  return out;
}

}  // namespace mtms::data
