#include "updrs/folds.hpp"

#include <random>

#include "updrs/errors.hpp"

namespace updrs {

FoldPlan make_folds(std::size_t n, std::size_t fold_count, Seed seed) {
  if (fold_count < 2) throw BadFoldSpec("need at least 2 folds, got " + std::to_string(fold_count));
  if (n < fold_count) {
    throw BadFoldSpec("cannot split " + std::to_string(n) + " instances into " +
                      std::to_string(fold_count) + " folds");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(derive_seed(seed, {n, fold_count}));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  FoldPlan plan{seed, n, fold_count, std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) plan.assignment[order[i]] = i % fold_count;
  return plan;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

}  // namespace updrs
