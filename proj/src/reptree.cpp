#include "updrs/reptree.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <stdexcept>

#include "updrs/errors.hpp"
#include "updrs/numeric.hpp"
#include "updrs/splits.hpp"

namespace updrs {

namespace {

class VarianceTreeBuilder {
 public:
  VarianceTreeBuilder(const TabularProblem& p, const GrowOptions& o) : p_(p), o_(o) {
    if (o_.features_per_split == 0 || o_.features_per_split >= p.features()) {
      o_.features_per_split = p.features();
    }
  }

  std::vector<RepTree::Node> grow(std::vector<std::size_t> rows) {
    std::vector<double> ys(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = p_.target(rows[i]);
    root_sd_ = std::sqrt(population_variance(ys));
    grow_node(std::move(rows));
    return std::move(nodes_);
  }

 private:
  std::vector<std::size_t> candidate_features(std::size_t node_counter) const {
    std::vector<std::size_t> all(p_.features());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    if (o_.features_per_split >= all.size()) return all;
    std::mt19937_64 rng(derive_seed(o_.seed, {node_counter}));
    for (std::size_t i = 0; i < o_.features_per_split; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    all.resize(o_.features_per_split);
    std::sort(all.begin(), all.end());
    return all;
  }

  std::size_t grow_node(std::vector<std::size_t> rows) {
    const std::size_t idx = nodes_.size();
    nodes_.emplace_back();

    std::vector<double> ys(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = p_.target(rows[i]);
    nodes_[idx].mean = compensated_mean(ys);
    nodes_[idx].n = rows.size();
    const double sd = std::sqrt(population_variance(ys));

    SplitChoice split;
    if (rows.size() >= 2 * o_.min_instances && !(sd < o_.sd_stop_fraction * root_sd_)) {
      const auto features = candidate_features(idx);
      split = find_best_split(p_, rows, features, SplitCriterion::VarianceReduction,
                              o_.min_instances);
    }
    if (!split.found) return idx;

    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t r : rows) {
      (p_.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::size_t l = grow_node(std::move(left_rows));
    const std::size_t r = grow_node(std::move(right_rows));
    RepTree::Node& node = nodes_[idx];
    node.leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return idx;
  }

  const TabularProblem& p_;
  GrowOptions o_;
  double root_sd_ = 0.0;
  std::vector<RepTree::Node> nodes_;
};

/// Bottom-up reduced-error pruning. Returns the pruned subtree's prune-set SSE.
double prune_subtree(std::vector<RepTree::Node>& nodes, std::size_t idx, const TabularProblem& p,
                     const std::vector<std::size_t>& rows) {
  RepTree::Node& node = nodes[idx];
  double leaf_sse = 0.0;
  for (const std::size_t r : rows) {
    const double e = p.target(r) - node.mean;
    leaf_sse += e * e;
  }
  if (node.leaf) return leaf_sse;

  std::vector<std::size_t> left_rows, right_rows;
  for (const std::size_t r : rows) {
    (p.at(r, node.feature) <= node.threshold ? left_rows : right_rows).push_back(r);
  }
  const double subtree_sse = prune_subtree(nodes, node.left, p, left_rows) +
                             prune_subtree(nodes, node.right, p, right_rows);
  if (leaf_sse <= subtree_sse) {
    nodes[idx].leaf = true;
    return leaf_sse;
  }
  return subtree_sse;
}

std::vector<RepTree::Node> compact(const std::vector<RepTree::Node>& nodes) {
  std::vector<RepTree::Node> out;
  const auto copy = [&](auto&& self, std::size_t src) -> std::size_t {
    const std::size_t at = out.size();
    out.push_back(nodes[src]);
    if (!nodes[src].leaf) {
      const std::size_t l = self(self, nodes[src].left);
      const std::size_t r = self(self, nodes[src].right);
      out[at].left = l;
      out[at].right = r;
    } else {
      out[at].left = out[at].right = 0;
    }
    return at;
  };
  copy(copy, 0);
  return out;
}

double sse_of(const RepTree& tree, const TabularProblem& p, std::span<const std::size_t> rows) {
  double sse = 0.0;
  for (const std::size_t r : rows) {
    const double e = tree.predict(p.row(r)) - p.target(r);
    sse += e * e;
  }
  return sse;
}

}  // namespace

RepTree::RepTree(std::vector<Node> nodes, std::size_t feature_count,
                 std::vector<std::string> feature_names, PruneStats stats)
    : nodes_(std::move(nodes)),
      feature_count_(feature_count),
      names_(std::move(feature_names)),
      stats_(stats) {
  if (nodes_.empty()) throw InvalidParams("RepTree: no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!std::isfinite(n.mean)) throw InvalidParams("RepTree: non-finite leaf value");
    if (n.leaf) continue;
    if (n.left <= i || n.right <= i || n.left >= nodes_.size() || n.right >= nodes_.size()) {
      throw InvalidParams("RepTree: child indices must point forward");
    }
    if (n.feature >= feature_count_) throw InvalidParams("RepTree: split feature out of range");
  }
}

double RepTree::predict(std::span<const double> query) const {
  check_query(query, feature_count_);
  std::size_t idx = 0;
  while (!nodes_[idx].leaf) {
    const Node& n = nodes_[idx];
    idx = query[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[idx].mean;
}

std::size_t RepTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

void RepTree::describe(std::ostream& out) const {
  out << "regression tree: " << nodes_.size() << " nodes, " << leaf_count() << " leaves\n";
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& n = nodes_[idx];
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << std::setprecision(8);
    if (n.leaf) {
      out << "leaf (n=" << n.n << "): " << n.mean << "\n";
      continue;
    }
    const std::string name =
        n.feature < names_.size() ? names_[n.feature] : "x" + std::to_string(n.feature);
    out << name << " <= " << n.threshold << " (n=" << n.n << ")\n";
    stack.push_back({n.right, depth + 1});
    stack.push_back({n.left, depth + 1});
  }
}

RepTree grow_variance_tree(const TabularProblem& problem, std::span<const std::size_t> rows,
                           const GrowOptions& options) {
  if (rows.empty()) throw TooFewRows("cannot grow a tree on zero rows");
  if (options.min_instances < 1) throw InvalidParams("min_instances must be >= 1");
  VarianceTreeBuilder builder(problem, options);
  return RepTree(builder.grow({rows.begin(), rows.end()}), problem.features(),
                 problem.feature_names());
}

RepTree reptree_fit(const TabularProblem& problem, const TreeParams& params) {
  params.validate();
  const std::size_t n = problem.rows();
  GrowOptions grow;
  grow.min_instances = params.min_instances;
  grow.sd_stop_fraction = params.sd_stop_fraction;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (!params.prune) return grow_variance_tree(problem, order, grow);

  if (n < 2 * params.min_instances) {
    throw TooFewRows("REPTree with pruning needs at least " +
                     std::to_string(2 * params.min_instances) + " rows, got " + std::to_string(n));
  }
  std::mt19937_64 rng(derive_seed(params.seed, {}));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  auto prune_count = static_cast<std::size_t>(std::llround(static_cast<double>(n) * params.prune_fraction));
  prune_count = std::clamp<std::size_t>(prune_count, 1, n - 1);
  const std::vector<std::size_t> grow_rows(order.begin(), order.end() - static_cast<std::ptrdiff_t>(prune_count));
  const std::vector<std::size_t> prune_rows(order.end() - static_cast<std::ptrdiff_t>(prune_count), order.end());

  const RepTree unpruned = grow_variance_tree(problem, grow_rows, grow);
  std::vector<RepTree::Node> nodes = unpruned.nodes();
  RepTree::PruneStats stats;
  stats.unpruned_nodes = nodes.size();
  stats.prune_rows = prune_rows.size();
  stats.sse_before = sse_of(unpruned, problem, prune_rows);
  prune_subtree(nodes, 0, problem, prune_rows);

  RepTree pruned(compact(nodes), problem.features(), problem.feature_names(), stats);
  const double after = sse_of(pruned, problem, prune_rows);
  // Each collapse is no worse on the prune set, so the total cannot rise.
  if (after > stats.sse_before * (1.0 + 1e-12) + 1e-12) {
    throw std::logic_error("reduced-error pruning increased prune-set error");
  }
  stats.sse_after = after;
  return RepTree(pruned.nodes(), problem.features(), problem.feature_names(), stats);
}

double reptree_predict(const RepTree& tree, std::span<const double> query) {
  return tree.predict(query);
}

RepTreeLearner::RepTreeLearner(TreeParams params) : params_(params) { params_.validate(); }

std::unique_ptr<Model> RepTreeLearner::fit(const TabularProblem& problem, Seed seed) const {
  TreeParams p = params_;
  p.seed = seed;
  return std::make_unique<RepTree>(reptree_fit(problem, p));
}

nlohmann::json RepTreeLearner::params() const {
  auto j = params_.to_json();
  j.erase("smoothing_k");
  j.erase("seed");
  return j;
}

}  // namespace updrs
