#pragma once

// Independent reference computations for the oracle suites. Written directly
// from the definitions, without sharing code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double mean(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

// Textbook two-pass Pearson in long double.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Sort every training row by (distance, index) and apply the weight rule.
inline double knn_regression(const Matrix& train, const std::vector<double>& y,
                             const std::vector<double>& query, std::size_t k) {
  const std::size_t f = query.size();
  std::vector<double> lo(f, std::numeric_limits<double>::infinity());
  std::vector<double> hi(f, -std::numeric_limits<double>::infinity());
  for (const auto& row : train) {
    for (std::size_t j = 0; j < f; ++j) {
      lo[j] = std::min(lo[j], row[j]);
      hi[j] = std::max(hi[j], row[j]);
    }
  }
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < train.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      if (hi[j] == lo[j]) continue;
      s += std::abs((train[i][j] - lo[j]) / (hi[j] - lo[j]) - (query[j] - lo[j]) / (hi[j] - lo[j]));
    }
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  d.resize(k);
  std::vector<double> exact;
  for (const auto& [dist, i] : d) {
    if (dist == 0.0) exact.push_back(y[i]);
  }
  if (!exact.empty()) return mean(exact);
  double num = 0.0, den = 0.0;
  for (const auto& [dist, i] : d) {
    num += y[i] / dist;
    den += 1.0 / dist;
  }
  return num / den;
}

// Minimum-norm least squares with intercept via a complete orthogonal
// decomposition; fitted values are unique even when columns are collinear.
inline std::vector<double> least_squares_fit(const Matrix& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto p = static_cast<Eigen::Index>(x.front().size());
  Eigen::MatrixXd a(n, p + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) a(i, j + 1) = x[i][j];
    b(i) = y[i];
  }
  const Eigen::VectorXd beta = a.completeOrthogonalDecomposition().pseudoInverse() * b;
  const Eigen::VectorXd fitted = a * beta;
  return {fitted.data(), fitted.data() + n};
}

inline double population_sd(const std::vector<double>& v) {
  const double m = mean(v);
  long double s = 0.0L;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(static_cast<double>(s / v.size()));
}

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double sdr = 0.0;
};

// Every feature, every midpoint, SDR from the definition.
inline Split best_sdr_split(const Matrix& x, const std::vector<double>& y, std::size_t min_leaf,
                            double tie_slack = 1e-12) {
  Split best;
  const double total_sd = population_sd(y);
  for (std::size_t j = 0; j < x.front().size(); ++j) {
    std::vector<double> values;
    for (const auto& row : x) values.push_back(row[j]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
      const double threshold = (values[t] + values[t + 1]) / 2.0;
      std::vector<double> left, right;
      for (std::size_t i = 0; i < x.size(); ++i) (x[i][j] <= threshold ? left : right).push_back(y[i]);
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      const double n = static_cast<double>(y.size());
      const double sdr = total_sd - (left.size() / n) * population_sd(left) -
                         (right.size() / n) * population_sd(right);
      if (sdr <= tie_slack) continue;
      if (!best.found || sdr > best.sdr + tie_slack) best = {true, j, threshold, sdr};
    }
  }
  return best;
}

}  // namespace oracle
