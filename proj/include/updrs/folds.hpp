#pragma once

#include <cstddef>
#include <vector>

#include "updrs/learner.hpp"

namespace updrs {

/// Assignment of n instances to cross-validation folds.
struct FoldPlan {
  Seed seed = 1;
  std::size_t n = 0;
  std::size_t fold_count = 0;
  std::vector<std::size_t> assignment;  // fold index per instance

  /// Instances in fold f, ascending.
  std::vector<std::size_t> test_rows(std::size_t fold) const;
  /// Instances outside fold f, ascending.
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

/// Seeded shuffle of 0..n-1 dealt round-robin into folds, so fold sizes differ
/// by at most one. Throws BadFoldSpec unless 2 <= fold_count <= n.
FoldPlan make_folds(std::size_t n, std::size_t fold_count, Seed seed);

}  // namespace updrs
