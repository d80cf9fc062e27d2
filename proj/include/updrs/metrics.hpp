#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "updrs/data.hpp"

namespace updrs {

/// Pearson product-moment correlation. Returns nullopt when either input has
/// zero variance (the correlation is undefined). Throws LengthMismatch when
/// the lengths differ or are below two.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Mean absolute error. Throws LengthMismatch on unequal or empty inputs.
double mae(std::span<const double> predicted, std::span<const double> actual);

struct RankedFeature {
  std::string name;
  std::size_t column = 0;
  /// Empty when the column (or the target) is constant.
  std::optional<double> correlation;
};

/// Features ordered by descending correlation with the target; ties keep
/// column order and undefined correlations go last.
struct FeatureRanking {
  std::vector<RankedFeature> entries;
};

FeatureRanking rank_features(const TabularProblem& problem);

struct ClassificationTally {
  std::size_t n = 0;
  double accuracy = 0.0;
  /// confusion[actual][predicted]
  std::array<std::array<std::size_t, kSeverityClassCount>, kSeverityClassCount> confusion{};
};

ClassificationTally classification_tally(std::span<const SeverityClass> predicted,
                                         std::span<const SeverityClass> actual);

}  // namespace updrs
