#pragma once

#include <cstddef>
#include <span>

#include "updrs/data.hpp"

namespace updrs {

enum class SplitCriterion {
  StdDevReduction,    // sd(T) - sum |Ti|/|T| sd(Ti)
  VarianceReduction,  // var(T) - sum |Ti|/|T| var(Ti)
};

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
  std::size_t left_count = 0;
};

/// Population standard deviation / variance of `values`.
double population_variance(std::span<const double> values) noexcept;

/// Score of partitioning a node's targets into `left` and `right`.
double split_score(SplitCriterion criterion, std::span<const double> left,
                   std::span<const double> right);

/// Relative to the parent's spread; smaller score differences are ties.
inline constexpr double kSplitTieTolerance = 1e-12;

/// Best binary split of `rows` over the listed features (which must be in
/// ascending order). Thresholds are midpoints between consecutive distinct
/// values; values <= threshold go left. Both sides must keep at least
/// `min_leaf` rows, and only scores above the tie tolerance count. Ties go to the
/// lower feature index, then the lower threshold.
SplitChoice find_best_split(const TabularProblem& problem, std::span<const std::size_t> rows,
                            std::span<const std::size_t> features, SplitCriterion criterion,
                            std::size_t min_leaf);

}  // namespace updrs
