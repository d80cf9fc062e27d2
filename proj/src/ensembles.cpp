#include "updrs/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "updrs/errors.hpp"
#include "updrs/folds.hpp"
#include "updrs/parallel.hpp"

namespace updrs {

namespace {

std::vector<std::size_t> draw_sample(std::size_t n, const EnsembleParams& params, Seed stream) {
  std::vector<std::size_t> rows;
  if (!params.bootstrap) {
    rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
  }
  const auto size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.bag_percent * static_cast<double>(n) / 100.0)));
  std::mt19937_64 rng(stream);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  rows.resize(size);
  for (auto& r : rows) r = pick(rng);
  return rows;
}

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

void require_bases(std::span<const LearnerPtr> bases) {
  if (bases.empty()) throw InvalidParams("ensemble needs at least one base learner");
  for (const auto& b : bases) {
    if (!b) throw InvalidParams("null base learner");
  }
}

}  // namespace

void EnsembleParams::validate() const {
  if (iterations < 1) throw InvalidParams("iterations must be >= 1");
  if (!(bag_percent > 0.0 && bag_percent <= 100.0)) {
    throw InvalidParams("bag_percent must lie in (0, 100]");
  }
  if (meta_folds < 2) throw InvalidParams("meta_folds must be >= 2");
}

nlohmann::json EnsembleParams::to_json() const {
  return {{"iterations", iterations}, {"bag_percent", bag_percent},
          {"features_per_split", features_per_split}, {"meta_folds", meta_folds},
          {"bootstrap", bootstrap}};
}

std::size_t default_features_per_split(std::size_t feature_count) {
  if (feature_count == 0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(feature_count)))) + 1;
  return std::min(k, feature_count);
}

// ---------------------------------------------------------------------------

AveragingModel::AveragingModel(std::string label, std::vector<std::unique_ptr<Model>> members)
    : label_(std::move(label)), members_(std::move(members)) {
  if (members_.empty()) throw InvalidParams("AveragingModel: no members");
}

double AveragingModel::predict(std::span<const double> query) const {
  double sum = 0.0;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const double p = members_[i]->predict(query);
    sum += p;
    lo = i == 0 ? p : std::min(lo, p);
    hi = i == 0 ? p : std::max(hi, p);
  }
  return std::clamp(sum / static_cast<double>(members_.size()), lo, hi);
}

void AveragingModel::describe(std::ostream& out) const {
  out << label_ << ": mean of " << members_.size() << " members\n";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    out << "--- member " << i << "\n";
    members_[i]->describe(out);
  }
}

StackingModel::StackingModel(std::vector<std::unique_ptr<Model>> bases, std::unique_ptr<Model> meta,
                             std::vector<double> meta_features, std::vector<std::size_t> meta_fold,
                             std::vector<std::vector<std::size_t>> fold_training_rows)
    : bases_(std::move(bases)),
      meta_(std::move(meta)),
      meta_features_(std::move(meta_features)),
      meta_fold_(std::move(meta_fold)),
      fold_training_rows_(std::move(fold_training_rows)) {
  if (bases_.empty() || !meta_) throw InvalidParams("StackingModel: missing models");
}

double StackingModel::predict(std::span<const double> query) const {
  std::vector<double> level1(bases_.size());
  for (std::size_t b = 0; b < bases_.size(); ++b) level1[b] = bases_[b]->predict(query);
  return meta_->predict(level1);
}

void StackingModel::describe(std::ostream& out) const {
  out << "stacking: " << bases_.size() << " base models, meta model over their predictions\n";
  for (std::size_t b = 0; b < bases_.size(); ++b) {
    out << "--- base " << b << "\n";
    bases_[b]->describe(out);
  }
  out << "--- meta\n";
  meta_->describe(out);
}

// ---------------------------------------------------------------------------

std::unique_ptr<AveragingModel> bagging_fit(const Learner& base, const TabularProblem& problem,
                                            const EnsembleParams& params) {
  params.validate();
  std::vector<std::unique_ptr<Model>> members(params.iterations);
  parallel_for(params.iterations, [&](std::size_t i) {
    const Seed member_seed = derive_seed(params.seed, {i});
    const auto rows = draw_sample(problem.rows(), params, derive_seed(params.seed, {i, 0}));
    members[i] = with_context("bagging iteration " + std::to_string(i),
                              [&] { return base.fit(problem.subset(rows), member_seed); });
  });
  return std::make_unique<AveragingModel>("bagging(" + base.name() + ")", std::move(members));
}

std::unique_ptr<StackingModel> stacking_fit(std::span<const LearnerPtr> bases, const Learner& meta,
                                            const TabularProblem& problem,
                                            const EnsembleParams& params) {
  params.validate();
  require_bases(bases);
  const std::size_t n = problem.rows();
  const std::size_t nb = bases.size();
  const FoldPlan plan = make_folds(n, params.meta_folds, derive_seed(params.seed, {nb, n}));

  std::vector<std::vector<std::size_t>> training(plan.fold_count);
  std::vector<std::vector<std::size_t>> testing(plan.fold_count);
  for (std::size_t f = 0; f < plan.fold_count; ++f) {
    training[f] = plan.train_rows(f);
    testing[f] = plan.test_rows(f);
  }

  // Out-of-fold predictions, plus the final refits, one task per (base, fold).
  std::vector<double> level1(n * nb, 0.0);
  std::vector<std::unique_ptr<Model>> final_bases(nb);
  const std::size_t tasks = nb * (plan.fold_count + 1);
  parallel_for(tasks, [&](std::size_t t) {
    const std::size_t b = t / (plan.fold_count + 1);
    const std::size_t f = t % (plan.fold_count + 1);
    const std::string context = "stacking base " + bases[b]->name();
    if (f == plan.fold_count) {
      final_bases[b] = with_context(context, [&] {
        return bases[b]->fit(problem, derive_seed(params.seed, {b, plan.fold_count}));
      });
      return;
    }
    const auto model = with_context(context + ", internal fold " + std::to_string(f), [&] {
      return bases[b]->fit(problem.subset(training[f]), derive_seed(params.seed, {b, f}));
    });
    for (const std::size_t r : testing[f]) level1[r * nb + b] = model->predict(problem.row(r));
  });

  std::vector<std::string> names;
  std::set<std::string> used;
  for (std::size_t b = 0; b < nb; ++b) {
    std::string name = bases[b]->name();
    if (!used.insert(name).second) name += "#" + std::to_string(b);
    used.insert(name);
    names.push_back(std::move(name));
  }
  const TabularProblem meta_problem(level1, nb, {problem.targets().begin(), problem.targets().end()},
                                    names, problem.row_keys());
  auto meta_model = with_context("stacking meta learner " + meta.name(),
                                 [&] { return meta.fit(meta_problem, derive_seed(params.seed, {nb})); });

  return std::make_unique<StackingModel>(std::move(final_bases), std::move(meta_model),
                                         std::move(level1), plan.assignment, std::move(training));
}

std::unique_ptr<AveragingModel> voting_fit(std::span<const LearnerPtr> bases,
                                           const TabularProblem& problem, Seed seed) {
  require_bases(bases);
  std::vector<std::unique_ptr<Model>> members(bases.size());
  std::string label = "vote(";
  for (std::size_t b = 0; b < bases.size(); ++b) label += (b ? ", " : "") + bases[b]->name();
  label += ")";
  parallel_for(bases.size(), [&](std::size_t b) {
    members[b] = with_context("voting base " + bases[b]->name(),
                              [&] { return bases[b]->fit(problem, derive_seed(seed, {b})); });
  });
  return std::make_unique<AveragingModel>(label, std::move(members));
}

std::unique_ptr<AveragingModel> random_forest_fit(const TabularProblem& problem,
                                                  const EnsembleParams& params,
                                                  const ForestTreeOptions& tree) {
  params.validate();
  const std::size_t k =
      params.features_per_split == 0 ? default_features_per_split(problem.features())
                                     : params.features_per_split;
  if (k < 1 || k > problem.features()) {
    throw InvalidParams("features_per_split must lie in [1, " + std::to_string(problem.features()) +
                        "]");
  }
  std::vector<std::unique_ptr<Model>> members(params.iterations);
  parallel_for(params.iterations, [&](std::size_t t) {
    const auto rows = draw_sample(problem.rows(), params, derive_seed(params.seed, {t, 0}));
    GrowOptions grow;
    grow.min_instances = tree.min_instances;
    grow.sd_stop_fraction = tree.sd_stop_fraction;
    grow.features_per_split = k;
    grow.seed = derive_seed(params.seed, {t, 1});
    members[t] = std::make_unique<RepTree>(grow_variance_tree(problem, rows, grow));
  });
  return std::make_unique<AveragingModel>("random forest", std::move(members));
}

// ---------------------------------------------------------------------------

BaggingLearner::BaggingLearner(LearnerPtr base, EnsembleParams params)
    : base_(std::move(base)), params_(params) {
  if (!base_) throw InvalidParams("bagging needs a base learner");
  params_.validate();
}

std::unique_ptr<Model> BaggingLearner::fit(const TabularProblem& problem, Seed seed) const {
  EnsembleParams p = params_;
  p.seed = seed;
  return bagging_fit(*base_, problem, p);
}

nlohmann::json BaggingLearner::params() const {
  auto j = params_.to_json();
  j.erase("features_per_split");
  j.erase("meta_folds");
  j["base"] = {{"name", base_->name()}, {"params", base_->params()}};
  return j;
}

StackingLearner::StackingLearner(std::vector<LearnerPtr> bases, LearnerPtr meta, EnsembleParams params)
    : bases_(std::move(bases)), meta_(std::move(meta)), params_(params) {
  require_bases(bases_);
  if (!meta_) throw InvalidParams("stacking needs a meta learner");
  params_.validate();
}

std::string StackingLearner::name() const {
  std::string s = "Stacking(";
  for (std::size_t b = 0; b < bases_.size(); ++b) s += (b ? ", " : "") + bases_[b]->name();
  return s + " by " + meta_->name() + ")";
}

std::unique_ptr<Model> StackingLearner::fit(const TabularProblem& problem, Seed seed) const {
  EnsembleParams p = params_;
  p.seed = seed;
  return stacking_fit(bases_, *meta_, problem, p);
}

nlohmann::json StackingLearner::params() const {
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& b : bases_) bases.push_back({{"name", b->name()}, {"params", b->params()}});
  return {{"meta_folds", params_.meta_folds},
          {"bases", bases},
          {"meta", {{"name", meta_->name()}, {"params", meta_->params()}}}};
}

VotingLearner::VotingLearner(std::vector<LearnerPtr> bases) : bases_(std::move(bases)) {
  require_bases(bases_);
}

std::string VotingLearner::name() const {
  std::string s = "Vote(";
  for (std::size_t b = 0; b < bases_.size(); ++b) s += (b ? ", " : "") + bases_[b]->name();
  return s + ")";
}

std::unique_ptr<Model> VotingLearner::fit(const TabularProblem& problem, Seed seed) const {
  return voting_fit(bases_, problem, seed);
}

nlohmann::json VotingLearner::params() const {
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& b : bases_) bases.push_back({{"name", b->name()}, {"params", b->params()}});
  return {{"combination", "mean"}, {"bases", bases}};
}

RandomForestLearner::RandomForestLearner(EnsembleParams params, ForestTreeOptions tree)
    : params_(params), tree_(tree) {
  params_.validate();
}

std::unique_ptr<Model> RandomForestLearner::fit(const TabularProblem& problem, Seed seed) const {
  EnsembleParams p = params_;
  p.seed = seed;
  return random_forest_fit(problem, p, tree_);
}

nlohmann::json RandomForestLearner::params() const {
  auto j = params_.to_json();
  j.erase("meta_folds");
  j["min_instances"] = tree_.min_instances;
  j["sd_stop_fraction"] = tree_.sd_stop_fraction;
  return j;
}

}  // namespace updrs
