#include "mtms/data/folds.hpp"

#include "mtms/num/errors.hpp"
#include "mtms/num/random.hpp"

namespace mtms::data {

FoldPlan kfold_split(std::vector<std::string> ids, int k, int val_count, std::uint64_t seed) {
  const int n = static_cast<int>(ids.size());
  if (k < 2) throw InvalidArgument("kfold_split: k must be >= 2");
  if (n < k) {
    throw InvalidArgument("kfold_split: " + std::to_string(n) + " videos is too few for " + std::to_string(k) +
                          " folds");
  }
  if (val_count < 0) throw InvalidArgument("kfold_split: negative validation count");
  const int largest_test = (n + k - 1) / k;
  if (val_count >= n - largest_test) {
    throw InvalidArgument("kfold_split: validation count leaves no training videos");
  }

  num::Rng rng(seed);
  rng.shuffle(ids);

  FoldPlan plan;
  int start = 0;
  for (int f = 0; f < k; ++f) {
    const int size = n / k + (f < n % k ? 1 : 0);
    Fold fold;
    for (int i = 0; i < size; ++i) fold.test.push_back(ids[static_cast<std::size_t>(start + i)]);
    for (int i = 0; i < n - size; ++i) {
      const auto& id = ids[static_cast<std::size_t>((start + size + i) % n)];
      (i < val_count ? fold.val : fold.train).push_back(id);
    }
    plan.folds.push_back(std::move(fold));
    start += size;
  }
  return plan;
}

}  // namespace mtms::data
