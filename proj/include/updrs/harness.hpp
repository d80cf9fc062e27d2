#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "updrs/data.hpp"
#include "updrs/folds.hpp"
#include "updrs/learner.hpp"
#include "updrs/metrics.hpp"

namespace updrs {

inline constexpr std::size_t kDefaultFolds = 10;
inline constexpr Seed kDefaultSeed = 1;

struct FoldResult {
  std::size_t fold = 0;
  std::size_t test_size = 0;
  std::optional<double> r;  // undefined for constant or single-row folds
  double mae = 0.0;
};

/// Cross-validation result for one method on one dataset. Pooled statistics
/// come from the pooled prediction vector, never from per-fold averages.
struct EvalReport {
  std::string method_name;
  std::string dataset_tag;
  Seed seed = kDefaultSeed;
  std::size_t fold_count = 0;
  std::size_t n = 0;
  std::optional<double> pooled_r;
  double pooled_mae = 0.0;
  std::vector<FoldResult> per_fold;
  double wall_time_s = 0.0;
  nlohmann::json params = nlohmann::json::object();
  std::string note;
  /// Placeholder row for a method that is listed but not evaluated.
  bool out_of_scope = false;
  /// Held-out prediction for every input row, in input order.
  std::vector<double> predictions;
};

/// Fits on each fold's complement and predicts the fold. Learner seeds are
/// derive_seed(seed, {fold}). Folds may run concurrently; the result does not
/// depend on scheduling.
EvalReport cross_validate(const TabularProblem& problem, const Learner& learner,
                          std::size_t fold_count = kDefaultFolds, Seed seed = kDefaultSeed,
                          std::string dataset_tag = "full");

/// Same, on a caller-supplied plan.
EvalReport cross_validate(const TabularProblem& problem, const Learner& learner,
                          const FoldPlan& plan, std::string dataset_tag = "full");

/// Method identifiers accepted by make_preset, in table order.
std::span<const std::string_view> preset_names();

/// Learner presets: m5p, reptree, knn (k=7), bag-m5p, stack, vote, forest.
/// Throws InvalidParams for unknown names.
LearnerPtr make_preset(std::string_view method);

struct Table2Report {
  FeatureRanking ranking;
  std::size_t n = 0;
};

Table2Report run_table2(const TabularProblem& problem);

/// M5P, REPTree and kNN(k=7) rows plus an out-of-scope SVM marker row.
std::vector<EvalReport> run_table3(const TabularProblem& problem, Seed seed = kDefaultSeed,
                                   std::size_t fold_count = kDefaultFolds);

/// Bagging(M5P), Stacking({M5P, REPTree} by M5P), Vote(M5P, REPTree), RandomForest.
std::vector<EvalReport> run_table4(const TabularProblem& problem, Seed seed = kDefaultSeed,
                                   std::size_t fold_count = kDefaultFolds);

/// M5P on the whole-number-target subset. Throws EmptySubset.
EvalReport run_verification(const TabularProblem& problem, Seed seed = kDefaultSeed,
                            std::size_t fold_count = kDefaultFolds);

struct ClassificationReport {
  std::string method_name;
  std::string dataset_tag = "severity-classes";
  Seed seed = kDefaultSeed;
  std::size_t fold_count = 0;
  std::size_t n = 0;
  SeverityCounts distribution;
  ClassificationTally tally;
  SeverityClass majority_class = SeverityClass::Mild;
  double majority_accuracy = 0.0;
  double wall_time_s = 0.0;
  std::vector<SeverityClass> predictions;
};

/// Severity classes from the motor-UPDRS targets, then k-NN classification
/// (k = 6) under cross-validation.
ClassificationReport run_classification(const TabularProblem& problem, Seed seed = kDefaultSeed,
                                        std::size_t fold_count = kDefaultFolds, std::size_t k = 6);

/// Bags by subject and day, mean-propositionalised, then M5P regression under
/// cross-validation.
EvalReport run_mil(std::span<const Record> records, Seed seed = kDefaultSeed,
                   std::size_t fold_count = kDefaultFolds);

// Rendering -----------------------------------------------------------------

struct RenderOptions {
  bool include_timing = true;
};

nlohmann::json to_json(const EvalReport& report, const RenderOptions& options = {});
nlohmann::json to_json(const Table2Report& report);
nlohmann::json to_json(const ClassificationReport& report, const RenderOptions& options = {});

std::string render_markdown(const Table2Report& report);
std::string render_markdown(std::span<const EvalReport> rows, std::string_view title,
                            const RenderOptions& options = {});
std::string render_markdown(const ClassificationReport& report, const RenderOptions& options = {});

}  // namespace updrs
