#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "updrs/data.hpp"
#include "updrs/learner.hpp"
#include "updrs/tree_params.hpp"

namespace updrs {

/// Reduced-error pruning bookkeeping; zeros when the tree was not pruned.
struct RepTreePruneStats {
  std::size_t unpruned_nodes = 0;
  std::size_t prune_rows = 0;
  double sse_before = 0.0;  // prune-set squared error of the unpruned tree
  double sse_after = 0.0;   // ... and of the pruned tree
};

/// Regression tree with constant leaves, grown by variance reduction.
class RepTree final : public Model {
 public:
  struct Node {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double mean = 0.0;  // mean grow-set target at the node
    std::size_t n = 0;  // grow-set rows at the node
  };

  using PruneStats = RepTreePruneStats;

  RepTree(std::vector<Node> nodes, std::size_t feature_count,
          std::vector<std::string> feature_names = {}, PruneStats stats = {});

  double predict(std::span<const double> query) const override;
  std::size_t feature_count() const noexcept override { return feature_count_; }
  void describe(std::ostream& out) const override;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const noexcept;
  const PruneStats& prune_stats() const noexcept { return stats_; }

 private:
  std::vector<Node> nodes_;
  std::size_t feature_count_;
  std::vector<std::string> names_;
  PruneStats stats_;
};

/// Options for growing an unpruned variance-reduction tree.
struct GrowOptions {
  std::size_t min_instances = 2;
  double sd_stop_fraction = 0.05;
  /// Features examined per node; 0 (or >= F) means all of them. When smaller,
  /// a fresh subset is drawn at each node from the stream (seed, node counter).
  std::size_t features_per_split = 0;
  Seed seed = 1;
};

/// Grows on the listed rows (repeats allowed) without pruning.
RepTree grow_variance_tree(const TabularProblem& problem, std::span<const std::size_t> rows,
                           const GrowOptions& options);

/// Shuffles rows by params.seed, grows on the first (1 - prune_fraction) and
/// applies reduced-error pruning on the rest: a subtree becomes a leaf
/// whenever that does not increase prune-set squared error. With
/// params.prune = false the whole problem is the grow set.
/// Throws TooFewRows.
RepTree reptree_fit(const TabularProblem& problem,
                    const TreeParams& params = TreeParams::reptree_defaults());

double reptree_predict(const RepTree& tree, std::span<const double> query);

class RepTreeLearner final : public Learner {
 public:
  explicit RepTreeLearner(TreeParams params = TreeParams::reptree_defaults());
  std::string name() const override { return "REPTree"; }
  /// The seed replaces params.seed.
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  TreeParams params_;
};

}  // namespace updrs
