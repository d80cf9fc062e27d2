#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "updrs/data.hpp"
#include "updrs/learner.hpp"
#include "updrs/reptree.hpp"

namespace updrs {

struct EnsembleParams {
  std::size_t iterations = 10;
  double bag_percent = 100.0;
  /// Forest only; 0 selects floor(log2 F) + 1.
  std::size_t features_per_split = 0;
  std::size_t meta_folds = 10;
  Seed seed = 1;
  /// When false, every member trains on the full data in original order
  /// instead of a bootstrap sample.
  bool bootstrap = true;

  static EnsembleParams bagging_defaults() { return {}; }
  static EnsembleParams forest_defaults() {
    EnsembleParams p;
    p.iterations = 100;
    return p;
  }

  /// Throws InvalidParams.
  void validate() const;
  nlohmann::json to_json() const;
};

/// floor(log2 F) + 1, capped at F.
std::size_t default_features_per_split(std::size_t feature_count);

/// Unweighted mean of member predictions, reduced in member order.
class AveragingModel final : public Model {
 public:
  AveragingModel(std::string label, std::vector<std::unique_ptr<Model>> members);
  double predict(std::span<const double> query) const override;
  std::size_t feature_count() const noexcept override { return members_.front()->feature_count(); }
  void describe(std::ostream& out) const override;
  const std::vector<std::unique_ptr<Model>>& members() const noexcept { return members_; }

 private:
  std::string label_;
  std::vector<std::unique_ptr<Model>> members_;
};

/// Base models refitted on all rows, combined by a meta model over their
/// predictions.
class StackingModel final : public Model {
 public:
  StackingModel(std::vector<std::unique_ptr<Model>> bases, std::unique_ptr<Model> meta,
                std::vector<double> meta_features, std::vector<std::size_t> meta_fold,
                std::vector<std::vector<std::size_t>> fold_training_rows);

  double predict(std::span<const double> query) const override;
  std::size_t feature_count() const noexcept override { return bases_.front()->feature_count(); }
  void describe(std::ostream& out) const override;

  std::size_t base_count() const noexcept { return bases_.size(); }
  /// Out-of-fold base predictions the meta model was trained on, row-major
  /// N x base_count.
  const std::vector<double>& meta_features() const noexcept { return meta_features_; }
  /// Internal fold of each training row.
  const std::vector<std::size_t>& meta_fold() const noexcept { return meta_fold_; }
  /// Rows each internal fold's base models were trained on.
  const std::vector<std::vector<std::size_t>>& fold_training_rows() const noexcept {
    return fold_training_rows_;
  }

 private:
  std::vector<std::unique_ptr<Model>> bases_;
  std::unique_ptr<Model> meta_;
  std::vector<double> meta_features_;
  std::vector<std::size_t> meta_fold_;
  std::vector<std::vector<std::size_t>> fold_training_rows_;
};

/// Member i draws its sample from the stream derive_seed(seed, {i, 0}) and
/// fits the base with seed derive_seed(seed, {i}).
std::unique_ptr<AveragingModel> bagging_fit(const Learner& base, const TabularProblem& problem,
                                            const EnsembleParams& params);

/// Base b is fitted on internal fold f's complement with seed
/// derive_seed(seed, {b, f}) and refitted on all rows with
/// derive_seed(seed, {b, meta_folds}); the meta learner uses
/// derive_seed(seed, {bases}).
std::unique_ptr<StackingModel> stacking_fit(std::span<const LearnerPtr> bases, const Learner& meta,
                                            const TabularProblem& problem,
                                            const EnsembleParams& params);

/// Base b is fitted with derive_seed(seed, {b}).
std::unique_ptr<AveragingModel> voting_fit(std::span<const LearnerPtr> bases,
                                           const TabularProblem& problem, Seed seed = 1);

/// Growth settings of each forest tree (features_per_split and seed are set
/// per tree from EnsembleParams).
struct ForestTreeOptions {
  std::size_t min_instances = 1;
  double sd_stop_fraction = 0.0316227766016838;  // variance fraction 1e-3
};

/// Tree t samples from derive_seed(seed, {t, 0}) and draws its per-node
/// feature subsets from derive_seed(seed, {t, 1}).
std::unique_ptr<AveragingModel> random_forest_fit(const TabularProblem& problem,
                                                  const EnsembleParams& params,
                                                  const ForestTreeOptions& tree = {});

class BaggingLearner final : public Learner {
 public:
  BaggingLearner(LearnerPtr base, EnsembleParams params = EnsembleParams::bagging_defaults());
  std::string name() const override { return "Bagging(" + base_->name() + ")"; }
  /// The seed replaces params.seed.
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  LearnerPtr base_;
  EnsembleParams params_;
};

class StackingLearner final : public Learner {
 public:
  StackingLearner(std::vector<LearnerPtr> bases, LearnerPtr meta,
                  EnsembleParams params = EnsembleParams::bagging_defaults());
  std::string name() const override;
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  std::vector<LearnerPtr> bases_;
  LearnerPtr meta_;
  EnsembleParams params_;
};

class VotingLearner final : public Learner {
 public:
  explicit VotingLearner(std::vector<LearnerPtr> bases);
  std::string name() const override;
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  std::vector<LearnerPtr> bases_;
};

class RandomForestLearner final : public Learner {
 public:
  explicit RandomForestLearner(EnsembleParams params = EnsembleParams::forest_defaults(),
                               ForestTreeOptions tree = {});
  std::string name() const override { return "RandomForest"; }
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  EnsembleParams params_;
  ForestTreeOptions tree_;
};

}  // namespace updrs
