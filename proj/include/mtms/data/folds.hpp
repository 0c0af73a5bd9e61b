#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mtms::data {

struct Fold {
  std::vector<std::string> test;
  std::vector<std::string> train;
  std::vector<std::string> val;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

// Seeded shuffle, then k contiguous test blocks (sizes differ by at most one).
// For each fold the remaining ids, taken in shuffled order starting after the
// test block, give `val_count` validation ids and the rest for training.
FoldPlan kfold_split(std::vector<std::string> video_ids, int k, int val_count, std::uint64_t seed);

}  // namespace mtms::data
