#include "ltn/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ltn/error.hpp"

namespace ltn {

namespace {

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace

SplitIndices split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DataError("test fraction must lie in (0, 1)");
  if (n < 2) throw DataError("need at least 2 rows to split");
  auto idx = shuffled(n, seed);
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  SplitIndices out;
  out.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t i) const {
  if (i >= folds.size()) throw DataError("fold index out of range");
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != i) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  return out;
}

FoldPlan kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw DataError("k-fold needs 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  const auto idx = shuffled(n, seed);
  FoldPlan plan{k, seed, {}};
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    plan.folds.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                            idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return plan;
}

}  // namespace ltn
