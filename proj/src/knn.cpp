#include "updrs/knn.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "updrs/errors.hpp"

namespace updrs {

KnnModel KnnModel::fit(const TabularProblem& problem, std::size_t k) {
  if (k < 1 || k > problem.rows()) {
    throw InvalidK("k must be in [1, " + std::to_string(problem.rows()) + "], got " +
                   std::to_string(k));
  }
  KnnModel m;
  m.k_ = k;
  m.feature_count_ = problem.features();
  m.targets_.assign(problem.targets().begin(), problem.targets().end());

  const std::size_t f = m.feature_count_;
  m.ranges_.resize(f);
  m.inv_width_.resize(f);
  for (std::size_t j = 0; j < f; ++j) {
    double lo = problem.at(0, j), hi = lo;
    for (std::size_t i = 1; i < problem.rows(); ++i) {
      lo = std::min(lo, problem.at(i, j));
      hi = std::max(hi, problem.at(i, j));
    }
    m.ranges_[j] = {lo, hi};
    m.inv_width_[j] = hi > lo ? 1.0 / (hi - lo) : 0.0;
  }

  m.scaled_.resize(problem.rows() * f);
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      m.scaled_[i * f + j] = (problem.at(i, j) - m.ranges_[j].first) * m.inv_width_[j];
    }
  }
  return m;
}

std::vector<Neighbor> KnnModel::nearest(std::span<const double> query) const {
  check_query(query, feature_count_);
  const std::size_t f = feature_count_;
  std::vector<double> q(f);
  for (std::size_t j = 0; j < f; ++j) q[j] = (query[j] - ranges_[j].first) * inv_width_[j];

  std::vector<Neighbor> all(rows());
  for (std::size_t i = 0; i < rows(); ++i) {
    const double* r = scaled_.data() + i * f;
    double d = 0.0;
    for (std::size_t j = 0; j < f; ++j) d += std::abs(r[j] - q[j]);
    all[i] = {d, i};
  }
  const auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.row < b.row);
  };
  const auto kth = all.begin() + static_cast<std::ptrdiff_t>(k_);
  std::nth_element(all.begin(), kth - 1, all.end(), closer);
  std::sort(all.begin(), kth, closer);
  all.resize(k_);
  return all;
}

double KnnModel::predict_regression(std::span<const double> query) const {
  const auto nn = nearest(query);
  if (nn.front().distance == 0.0) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& n : nn) {
      if (n.distance != 0.0) break;
      sum += targets_[n.row];
      ++count;
    }
    return sum / static_cast<double>(count);
  }
  double num = 0.0, den = 0.0;
  for (const auto& n : nn) {
    const double w = 1.0 / n.distance;
    num += w * targets_[n.row];
    den += w;
  }
  return num / den;
}

SeverityClass KnnModel::predict_class(std::span<const double> query) const {
  const auto nn = nearest(query);
  const bool exact = nn.front().distance == 0.0;
  std::array<double, kSeverityClassCount> votes{};
  for (const auto& n : nn) {
    if (exact && n.distance != 0.0) break;
    const double label = targets_[n.row];
    if (label != 0.0 && label != 1.0 && label != 2.0) {
      throw DataError("kNN classifier: training target is not a severity class code");
    }
    votes[static_cast<std::size_t>(label)] += exact ? 1.0 : 1.0 / n.distance;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kSeverityClassCount; ++c) {
    if (votes[c] >= votes[best]) best = c;
  }
  return static_cast<SeverityClass>(best);
}

namespace {

class KnnRegressionModel final : public Model {
 public:
  explicit KnnRegressionModel(KnnModel m) : m_(std::move(m)) {}
  double predict(std::span<const double> query) const override {
    return m_.predict_regression(query);
  }
  std::size_t feature_count() const noexcept override { return m_.features(); }
  void describe(std::ostream& out) const override {
    out << "kNN regression: k=" << m_.k() << ", " << m_.rows()
        << " stored rows, Manhattan distance, 1/d weights\n";
    for (std::size_t j = 0; j < m_.ranges().size(); ++j) {
      out << "  range[" << j << "] = [" << m_.ranges()[j].first << ", " << m_.ranges()[j].second
          << "]\n";
    }
  }

 private:
  KnnModel m_;
};

}  // namespace

std::unique_ptr<Model> KnnLearner::fit(const TabularProblem& problem, Seed) const {
  return std::make_unique<KnnRegressionModel>(KnnModel::fit(problem, k_));
}

nlohmann::json KnnLearner::params() const {
  return {{"k", k_}, {"distance", "manhattan"}, {"weighting", "inverse-distance"},
          {"normalize", "range"}};
}

}  // namespace updrs
