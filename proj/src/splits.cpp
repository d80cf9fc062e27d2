#include "updrs/splits.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "updrs/numeric.hpp"

namespace updrs {

namespace {

double spread(SplitCriterion criterion, double variance) {
  return criterion == SplitCriterion::StdDevReduction ? std::sqrt(variance) : variance;
}

// Welford accumulator; a run of equal values keeps m2 exactly zero.
struct Running {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    n += 1.0;
    const double delta = v - mean;
    mean += delta / n;
    m2 += delta * (v - mean);
  }
  double variance() const { return n > 0.0 ? std::max(0.0, m2 / n) : 0.0; }
};

}  // namespace

double population_variance(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  const double mu = compensated_mean(values);
  CompensatedSum ss;
  for (double v : values) ss.add((v - mu) * (v - mu));
  return ss.value() / static_cast<double>(values.size());
}

double split_score(SplitCriterion criterion, std::span<const double> left,
                   std::span<const double> right) {
  std::vector<double> all(left.begin(), left.end());
  all.insert(all.end(), right.begin(), right.end());
  const double n = static_cast<double>(all.size());
  return spread(criterion, population_variance(all)) -
         static_cast<double>(left.size()) / n * spread(criterion, population_variance(left)) -
         static_cast<double>(right.size()) / n * spread(criterion, population_variance(right));
}

SplitChoice find_best_split(const TabularProblem& problem, std::span<const std::size_t> rows,
                            std::span<const std::size_t> features, SplitCriterion criterion,
                            std::size_t min_leaf) {
  SplitChoice best;
  const std::size_t n = rows.size();
  min_leaf = std::max<std::size_t>(min_leaf, 1);
  if (n < 2 * min_leaf) return best;

  Running all;
  for (const std::size_t r : rows) all.add(problem.target(r));
  const double nd = static_cast<double>(n);
  const double parent = spread(criterion, all.variance());
  if (parent <= 0.0) return best;
  // Scores closer than this count as equal, so the earlier candidate stays.
  const double tie = kSplitTieTolerance * parent;

  std::vector<std::pair<double, double>> column(n);  // (feature value, target)
  std::vector<double> right_variance(n);  // variance of column[i..n)
  for (const std::size_t j : features) {
    for (std::size_t i = 0; i < n; ++i) column[i] = {problem.at(rows[i], j), problem.target(rows[i])};
    std::sort(column.begin(), column.end());
    if (column.front().first == column.back().first) continue;

    Running suffix;
    for (std::size_t i = n; i-- > 0;) {
      suffix.add(column[i].second);
      right_variance[i] = suffix.variance();
    }

    Running prefix;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      prefix.add(column[i].second);
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < min_leaf) continue;
      if (nr < min_leaf) break;
      const double lo = column[i].first;
      const double hi = column[i + 1].first;
      if (!(lo < hi)) continue;

      const double nld = static_cast<double>(nl), nrd = static_cast<double>(nr);
      const double left = spread(criterion, prefix.variance());
      const double right = spread(criterion, right_variance[i + 1]);
      const double score = parent - nld / nd * left - nrd / nd * right;
      if (score > tie && (!best.found || score > best.score + tie)) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = {true, j, threshold, score, nl};
      }
    }
  }
  return best;
}

}  // namespace updrs
