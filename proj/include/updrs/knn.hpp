#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "updrs/data.hpp"
#include "updrs/learner.hpp"

namespace updrs {

struct Neighbor {
  double distance = 0.0;
  std::size_t row = 0;  // index into the training rows
};

/// Exhaustive k-nearest-neighbour model over range-normalised features with
/// Manhattan distance and 1/d weighting.
///
/// Each feature is rescaled to [0,1] by the training (min, max); constant
/// features contribute nothing to the distance. The k nearest rows are the
/// first k in (distance, row index) order, so ties at the k-th place go to
/// the lower training index. Neighbours at distance zero, when present, take
/// the whole vote with equal weight.
class KnnModel {
 public:
  /// Throws InvalidK unless 1 <= k <= problem.rows().
  static KnnModel fit(const TabularProblem& problem, std::size_t k);

  double predict_regression(std::span<const double> query) const;

  /// Targets must hold SeverityClass codes (0, 1, 2). Weighted vote; equal
  /// vote totals resolve toward the more severe class.
  SeverityClass predict_class(std::span<const double> query) const;

  /// The k nearest training rows, closest first.
  std::vector<Neighbor> nearest(std::span<const double> query) const;

  std::size_t k() const noexcept { return k_; }
  std::size_t rows() const noexcept { return targets_.size(); }
  std::size_t features() const noexcept { return feature_count_; }
  const std::vector<std::pair<double, double>>& ranges() const noexcept { return ranges_; }

 private:
  KnnModel() = default;

  std::size_t k_ = 1;
  std::size_t feature_count_ = 0;
  std::vector<double> scaled_;  // row-major, normalised training features
  std::vector<double> targets_;
  std::vector<std::pair<double, double>> ranges_;
  std::vector<double> inv_width_;  // 0 for constant features
};

class KnnLearner final : public Learner {
 public:
  explicit KnnLearner(std::size_t k) : k_(k) {}
  std::string name() const override { return "kNN(k=" + std::to_string(k_) + ")"; }
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  std::size_t k_;
};

}  // namespace updrs
