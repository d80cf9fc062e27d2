#include "updrs/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "updrs/ensembles.hpp"
#include "updrs/errors.hpp"
#include "updrs/knn.hpp"
#include "updrs/m5tree.hpp"
#include "updrs/parallel.hpp"
#include "updrs/reptree.hpp"

namespace updrs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_disjoint(const FoldPlan& plan, std::size_t fold, std::span<const std::size_t> train,
                    std::span<const std::size_t> test) {
  std::vector<char> in_test(plan.n, 0);
  for (const std::size_t r : test) {
    if (plan.assignment[r] != fold) throw std::logic_error("test row outside its fold");
    in_test[r] = 1;
  }
  for (const std::size_t r : train) {
    if (in_test[r]) throw std::logic_error("row used for both training and evaluation");
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fixed(const std::optional<double>& v, int digits = 4) {
  return v ? fixed(*v, digits) : "undefined";
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

constexpr std::array<std::string_view, 7> kPresets = {"m5p",     "reptree", "knn",   "bag-m5p",
                                                      "stack",   "vote",    "forest"};

}  // namespace

EvalReport cross_validate(const TabularProblem& problem, const Learner& learner,
                          std::size_t fold_count, Seed seed, std::string dataset_tag) {
  return cross_validate(problem, learner, make_folds(problem.rows(), fold_count, seed),
                        std::move(dataset_tag));
}

EvalReport cross_validate(const TabularProblem& problem, const Learner& learner,
                          const FoldPlan& plan, std::string dataset_tag) {
  if (plan.n != problem.rows()) throw BadFoldSpec("fold plan size does not match the problem");
  const auto start = Clock::now();

  std::vector<double> predictions(problem.rows(), 0.0);
  parallel_for(plan.fold_count, [&](std::size_t f) {
    const auto train = plan.train_rows(f);
    const auto test = plan.test_rows(f);
    check_disjoint(plan, f, train, test);
    std::unique_ptr<Model> model;
    try {
      model = learner.fit(problem.subset(train), derive_seed(plan.seed, {f}));
    } catch (const DataError& e) {
      throw DataError("fold " + std::to_string(f) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("fold " + std::to_string(f) + ": " + e.what());
    }
    for (const std::size_t r : test) predictions[r] = model->predict(problem.row(r));
  });

  EvalReport report;
  report.method_name = learner.name();
  report.dataset_tag = std::move(dataset_tag);
  report.seed = plan.seed;
  report.fold_count = plan.fold_count;
  report.n = problem.rows();
  report.params = learner.params();
  report.pooled_r = pearson(predictions, problem.targets());
  report.pooled_mae = mae(predictions, problem.targets());
  for (std::size_t f = 0; f < plan.fold_count; ++f) {
    const auto test = plan.test_rows(f);
    std::vector<double> p, a;
    for (const std::size_t r : test) {
      p.push_back(predictions[r]);
      a.push_back(problem.target(r));
    }
    FoldResult fr{f, test.size(), std::nullopt, mae(p, a)};
    if (test.size() >= 2) fr.r = pearson(p, a);
    report.per_fold.push_back(fr);
  }
  report.predictions = std::move(predictions);
  report.wall_time_s = seconds_since(start);
  return report;
}

std::span<const std::string_view> preset_names() { return kPresets; }

LearnerPtr make_preset(std::string_view method) {
  const auto m5 = std::make_shared<M5Learner>();
  const auto rep = std::make_shared<RepTreeLearner>();
  if (method == "m5p") return m5;
  if (method == "reptree") return rep;
  if (method == "knn") return std::make_shared<KnnLearner>(7);
  if (method == "bag-m5p") return std::make_shared<BaggingLearner>(m5);
  if (method == "stack") return std::make_shared<StackingLearner>(std::vector<LearnerPtr>{m5, rep}, m5);
  if (method == "vote") return std::make_shared<VotingLearner>(std::vector<LearnerPtr>{m5, rep});
  if (method == "forest") return std::make_shared<RandomForestLearner>();
  throw InvalidParams("unknown method '" + std::string(method) + "'");
}

Table2Report run_table2(const TabularProblem& problem) {
  return {rank_features(problem), problem.rows()};
}

std::vector<EvalReport> run_table3(const TabularProblem& problem, Seed seed, std::size_t fold_count) {
  const FoldPlan plan = make_folds(problem.rows(), fold_count, seed);
  std::vector<EvalReport> rows;
  rows.push_back(cross_validate(problem, *make_preset("m5p"), plan));
  EvalReport svm;
  svm.method_name = "SVM (nu-SVR)";
  svm.dataset_tag = "full";
  svm.seed = seed;
  svm.fold_count = fold_count;
  svm.n = problem.rows();
  svm.out_of_scope = true;
  svm.note = "not evaluated: kernel parameters for this row are not recoverable";
  rows.push_back(std::move(svm));
  rows.push_back(cross_validate(problem, *make_preset("reptree"), plan));
  rows.push_back(cross_validate(problem, *make_preset("knn"), plan));
  return rows;
}

std::vector<EvalReport> run_table4(const TabularProblem& problem, Seed seed, std::size_t fold_count) {
  const FoldPlan plan = make_folds(problem.rows(), fold_count, seed);
  std::vector<EvalReport> rows;
  for (const auto* name : {"bag-m5p", "stack", "vote", "forest"}) {
    rows.push_back(cross_validate(problem, *make_preset(name), plan));
  }
  return rows;
}

EvalReport run_verification(const TabularProblem& problem, Seed seed, std::size_t fold_count) {
  const TabularProblem subset = whole_updrs_subset(problem);
  auto report = cross_validate(subset, *make_preset("m5p"), fold_count, seed, "whole-updrs-subset");
  report.note = std::to_string(subset.rows()) + " of " + std::to_string(problem.rows()) +
                " rows have a whole-number motor UPDRS";
  return report;
}

ClassificationReport run_classification(const TabularProblem& problem, Seed seed,
                                        std::size_t fold_count, std::size_t k) {
  const auto start = Clock::now();
  std::vector<SeverityClass> actual(problem.rows());
  std::vector<double> codes(problem.rows());
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    actual[i] = discretize_severity(problem.target(i));
    codes[i] = static_cast<double>(actual[i]);
  }
  const TabularProblem labelled = problem.with_targets(std::move(codes));
  const FoldPlan plan = make_folds(labelled.rows(), fold_count, seed);

  std::vector<SeverityClass> predicted(labelled.rows(), SeverityClass::Mild);
  parallel_for(plan.fold_count, [&](std::size_t f) {
    const auto train = plan.train_rows(f);
    const auto test = plan.test_rows(f);
    check_disjoint(plan, f, train, test);
    const KnnModel model = KnnModel::fit(labelled.subset(train), k);
    for (const std::size_t r : test) predicted[r] = model.predict_class(labelled.row(r));
  });

  ClassificationReport report;
  report.method_name = "kNN classifier (k=" + std::to_string(k) + ")";
  report.seed = seed;
  report.fold_count = fold_count;
  report.n = labelled.rows();
  report.distribution = severity_counts(problem);
  report.tally = classification_tally(predicted, actual);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kSeverityClassCount; ++c) {
    if (report.distribution.counts[c] > report.distribution.counts[best]) best = c;
  }
  report.majority_class = static_cast<SeverityClass>(best);
  report.majority_accuracy =
      static_cast<double>(report.distribution.counts[best]) / static_cast<double>(report.n);
  report.predictions = std::move(predicted);
  report.wall_time_s = seconds_since(start);
  return report;
}

EvalReport run_mil(std::span<const Record> records, Seed seed, std::size_t fold_count) {
  const auto bags = make_bags(records);
  const TabularProblem problem = propositionalize(bags);
  auto report = cross_validate(problem, *make_preset("m5p"), fold_count, seed, "mil-propositionalized");
  report.note = std::to_string(bags.size()) +
                " subject-day bags, mean-propositionalised; evaluated as regression on the bag "
                "mean motor UPDRS";
  return report;
}

// ---------------------------------------------------------------------------
// Rendering

nlohmann::json to_json(const EvalReport& report, const RenderOptions& options) {
  nlohmann::json j;
  j["method"] = report.method_name;
  j["dataset_tag"] = report.dataset_tag;
  j["seed"] = report.seed;
  j["folds"] = report.fold_count;
  if (report.out_of_scope) {
    j["status"] = "out-of-scope";
    j["note"] = report.note;
    return j;
  }
  j["n"] = report.n;
  j["pooled_r"] = optional_json(report.pooled_r);
  j["pooled_mae"] = report.pooled_mae;
  auto folds = nlohmann::json::array();
  for (const auto& f : report.per_fold) {
    folds.push_back({{"fold", f.fold}, {"test_size", f.test_size}, {"r", optional_json(f.r)},
                     {"mae", f.mae}});
  }
  j["per_fold"] = std::move(folds);
  j["params"] = report.params;
  j["wall_time_s"] = options.include_timing ? nlohmann::json(report.wall_time_s) : nlohmann::json(nullptr);
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

nlohmann::json to_json(const Table2Report& report) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.ranking.entries.size(); ++i) {
    const auto& e = report.ranking.entries[i];
    rows.push_back({{"rank", i + 1}, {"feature", e.name}, {"correlation", optional_json(e.correlation)}});
  }
  return {{"table", "feature-correlation"}, {"target", "motor_UPDRS"}, {"n", report.n}, {"rows", rows}};
}

nlohmann::json to_json(const ClassificationReport& report, const RenderOptions& options) {
  nlohmann::json dist = nlohmann::json::object();
  auto confusion = nlohmann::json::array();
  for (std::size_t c = 0; c < kSeverityClassCount; ++c) {
    dist[to_string(static_cast<SeverityClass>(c))] = report.distribution.counts[c];
    confusion.push_back(report.tally.confusion[c]);
  }
  return {{"method", report.method_name},
          {"dataset_tag", report.dataset_tag},
          {"seed", report.seed},
          {"folds", report.fold_count},
          {"n", report.n},
          {"class_distribution", dist},
          {"accuracy", report.tally.accuracy},
          {"confusion", confusion},
          {"majority_class", to_string(report.majority_class)},
          {"majority_accuracy", report.majority_accuracy},
          {"wall_time_s", options.include_timing ? nlohmann::json(report.wall_time_s)
                                                 : nlohmann::json(nullptr)}};
}

std::string render_markdown(const Table2Report& report) {
  std::ostringstream out;
  out << "## Feature correlation with motor UPDRS (n = " << report.n << ")\n\n";
  out << "| Rank | Correlation | Attribute |\n|---:|---:|:---|\n";
  for (std::size_t i = 0; i < report.ranking.entries.size(); ++i) {
    const auto& e = report.ranking.entries[i];
    out << "| " << i + 1 << " | " << fixed(e.correlation) << " | " << e.name << " |\n";
  }
  return out.str();
}

std::string render_markdown(std::span<const EvalReport> rows, std::string_view title,
                            const RenderOptions& options) {
  std::ostringstream out;
  out << "## " << title << "\n\n";
  out << "| Method | Correlation coefficient | Mean absolute error | n | Folds | Seed |";
  if (options.include_timing) out << " Wall time (s) |";
  out << "\n|:---|---:|---:|---:|---:|---:|";
  if (options.include_timing) out << "---:|";
  out << "\n";
  for (const auto& r : rows) {
    out << "| " << r.method_name << " | ";
    if (r.out_of_scope) {
      out << "out of scope | out of scope | " << r.n << " | " << r.fold_count << " | " << r.seed << " |";
      if (options.include_timing) out << " - |";
    } else {
      out << fixed(r.pooled_r) << " | " << fixed(r.pooled_mae) << " | " << r.n << " | "
          << r.fold_count << " | " << r.seed << " |";
      if (options.include_timing) out << " " << fixed(r.wall_time_s, 2) << " |";
    }
    out << "\n";
  }
  bool notes = false;
  for (const auto& r : rows) {
    if (r.note.empty()) continue;
    if (!notes) out << "\n";
    notes = true;
    out << "- " << r.method_name << " [" << r.dataset_tag << "]: " << r.note << "\n";
  }
  return out.str();
}

std::string render_markdown(const ClassificationReport& report, const RenderOptions& options) {
  std::ostringstream out;
  out << "## Severity classification: " << report.method_name << "\n\n";
  out << "Class distribution:";
  for (std::size_t c = 0; c < kSeverityClassCount; ++c) {
    out << " " << to_string(static_cast<SeverityClass>(c)) << " " << report.distribution.counts[c]
        << (c + 1 < kSeverityClassCount ? "," : "\n");
  }
  out << "\n" << report.fold_count << "-fold CV, seed " << report.seed << ", n = " << report.n << "\n\n";
  out << "- accuracy: " << fixed(report.tally.accuracy) << "\n";
  out << "- majority baseline (" << to_string(report.majority_class)
      << "): " << fixed(report.majority_accuracy) << "\n";
  if (options.include_timing) out << "- wall time: " << fixed(report.wall_time_s, 2) << " s\n";
  out << "\nConfusion (rows actual, columns predicted):\n\n| | Mild | Moderate | Severe |\n|:---|---:|---:|---:|\n";
  for (std::size_t a = 0; a < kSeverityClassCount; ++a) {
    out << "| " << to_string(static_cast<SeverityClass>(a)) << " |";
    for (std::size_t p = 0; p < kSeverityClassCount; ++p) out << " " << report.tally.confusion[a][p] << " |";
    out << "\n";
  }
  return out.str();
}

}  // namespace updrs
