#include "updrs/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "updrs/errors.hpp"
#include "updrs/numeric.hpp"

namespace updrs {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("pearson: lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  if (x.size() < 2) throw LengthMismatch("pearson: need at least two points");

  const double mx = compensated_mean(x);
  const double my = compensated_mean(y);
  CompensatedSum sxy, sxx, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) return std::nullopt;
  const double r = sxy.value() / std::sqrt(sxx.value() * syy.value());
  return std::clamp(r, -1.0, 1.0);
}

double mae(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw LengthMismatch("mae: lengths " + std::to_string(predicted.size()) + " and " +
                         std::to_string(actual.size()));
  }
  CompensatedSum s;
  for (std::size_t i = 0; i < predicted.size(); ++i) s.add(std::abs(predicted[i] - actual[i]));
  return s.value() / static_cast<double>(predicted.size());
}

FeatureRanking rank_features(const TabularProblem& problem) {
  if (problem.rows() < 2) throw LengthMismatch("rank_features: need at least two rows");
  FeatureRanking ranking;
  ranking.entries.reserve(problem.features());
  for (std::size_t j = 0; j < problem.features(); ++j) {
    const auto col = problem.column(j);
    ranking.entries.push_back({problem.feature_names()[j], j, pearson(col, problem.targets())});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     if (!a.correlation) return false;
                     if (!b.correlation) return true;
                     return *a.correlation > *b.correlation;
                   });
  return ranking;
}

ClassificationTally classification_tally(std::span<const SeverityClass> predicted,
                                         std::span<const SeverityClass> actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw LengthMismatch("classification_tally: lengths " + std::to_string(predicted.size()) +
                         " and " + std::to_string(actual.size()));
  }
  ClassificationTally t;
  t.n = predicted.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.n; ++i) {
    const auto a = static_cast<std::size_t>(actual[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    ++t.confusion[a][p];
    if (a == p) ++hits;
  }
  t.accuracy = static_cast<double>(hits) / static_cast<double>(t.n);
  return t;
}

}  // namespace updrs
