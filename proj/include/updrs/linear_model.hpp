#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "updrs/data.hpp"

namespace updrs {

/// Sparse linear model: intercept plus coefficients on a subset of columns.
struct LinearModel {
  double intercept = 0.0;
  /// (feature index, coefficient), ascending by feature index.
  std::vector<std::pair<std::size_t, double>> coefficients;

  double evaluate(std::span<const double> x) const noexcept {
    double y = intercept;
    for (const auto& [j, c] : coefficients) y += c * x[j];
    return y;
  }

  /// Retained attributes plus the intercept.
  std::size_t parameter_count() const noexcept { return coefficients.size() + 1; }
};

struct LinearFit {
  LinearModel model;
  /// Root-mean-squared residual of the returned model over the fitted rows.
  double rms = 0.0;
};

/// Error inflation for a model with `parameters` free parameters fitted on
/// `n` rows: (n + v) / (n - v). Infinite when n <= v.
double adjusted_error(double rms, std::size_t n, std::size_t parameters) noexcept;

/// Least-squares fit of problem.target over `rows` using the columns in
/// `attributes`.
///
/// Columns are standardised and the normal equations are solved with a small
/// ridge (1e-8 relative to the mean diagonal) followed by one step of
/// iterative refinement, so collinear columns still give finite coefficients.
/// Columns that are constant over `rows` are never used. With `simplify`,
/// attributes are then dropped greedily, one per round, choosing the drop
/// with the lowest adjusted_error, for as long as that error does not rise.
LinearFit fit_linear(const TabularProblem& problem, std::span<const std::size_t> rows,
                     std::span<const std::size_t> attributes, bool simplify = true);

}  // namespace updrs
