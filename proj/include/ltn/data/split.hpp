#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ltn {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffled disjoint train/test indices; the test part has
/// round(n * test_fraction) rows, but at least one and at most n - 1.
SplitIndices split(std::size_t n, double test_fraction, std::uint64_t seed);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;

  /// Every index outside fold `i`.
  std::vector<std::size_t> train_indices(std::size_t i) const;
};

/// Shuffles 0..n-1 and deals it into k folds whose sizes differ by at
/// most one (the first n % k folds are larger).
FoldPlan kfold(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace ltn
