#include "updrs/m5tree.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <stdexcept>

#include "updrs/errors.hpp"
#include "updrs/splits.hpp"

namespace updrs {

void TreeParams::validate() const {
  if (min_instances < 1) throw InvalidParams("min_instances must be >= 1");
  if (!(sd_stop_fraction > 0.0 && sd_stop_fraction < 1.0)) {
    throw InvalidParams("sd_stop_fraction must lie in (0, 1)");
  }
  if (!(smoothing_k >= 0.0) || !std::isfinite(smoothing_k)) {
    throw InvalidParams("smoothing_k must be a finite value >= 0");
  }
  if (!(prune_fraction > 0.0 && prune_fraction < 1.0)) {
    throw InvalidParams("prune_fraction must lie in (0, 1)");
  }
}

nlohmann::json TreeParams::to_json() const {
  return {{"min_instances", min_instances}, {"sd_stop_fraction", sd_stop_fraction},
          {"smoothing_k", smoothing_k},     {"prune", prune},
          {"prune_fraction", prune_fraction}, {"seed", seed}};
}

namespace {

void write_model(std::ostream& out, const LinearModel& m, const std::vector<std::string>& names) {
  out << std::setprecision(6) << m.intercept;
  for (const auto& [j, c] : m.coefficients) {
    out << (c < 0 ? " - " : " + ") << std::abs(c) << "*";
    if (j < names.size()) {
      out << names[j];
    } else {
      out << "x" << j;
    }
  }
}

class M5Builder {
 public:
  M5Builder(const TabularProblem& p, const TreeParams& params) : p_(p), params_(params) {
    std::vector<double> ys(p.targets().begin(), p.targets().end());
    root_sd_ = std::sqrt(population_variance(ys));
    all_features_.resize(p.features());
    for (std::size_t j = 0; j < p.features(); ++j) all_features_[j] = j;
  }

  M5Tree build() {
    std::vector<std::size_t> rows(p_.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    grow(std::move(rows), {});
    install_models(0);
    if (params_.prune) prune(0);
    return flatten();
  }

 private:
  struct BuildNode {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> path_attributes;  // split attributes of the ancestors
    LinearFit fit;
    std::size_t parameters = 0;
  };

  std::size_t grow(std::vector<std::size_t> rows, std::vector<std::size_t> path) {
    const std::size_t idx = nodes_.size();
    nodes_.emplace_back();

    std::vector<double> ys(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = p_.target(rows[i]);
    const double sd = std::sqrt(population_variance(ys));

    SplitChoice split;
    if (rows.size() >= 2 * params_.min_instances && !(sd < params_.sd_stop_fraction * root_sd_)) {
      split = find_best_split(p_, rows, all_features_, SplitCriterion::StdDevReduction,
                              params_.min_instances);
    }
    if (split.found) {
      std::vector<std::size_t> left_rows, right_rows;
      for (const std::size_t r : rows) {
        (p_.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
      }
      std::vector<std::size_t> child_path = path;
      if (std::find(child_path.begin(), child_path.end(), split.feature) == child_path.end()) {
        child_path.push_back(split.feature);
        std::sort(child_path.begin(), child_path.end());
      }
      const std::size_t l = grow(std::move(left_rows), child_path);
      const std::size_t r = grow(std::move(right_rows), child_path);
      BuildNode& node = nodes_[idx];
      node.leaf = false;
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = l;
      node.right = r;
    }
    nodes_[idx].rows = std::move(rows);
    nodes_[idx].path_attributes = std::move(path);
    return idx;
  }

  /// Fits every node's model; returns the attributes split on in the subtree.
  std::set<std::size_t> install_models(std::size_t idx) {
    std::set<std::size_t> tested;
    std::vector<std::size_t> attributes;
    if (nodes_[idx].leaf) {
      attributes = nodes_[idx].path_attributes;
    } else {
      tested = install_models(nodes_[idx].left);
      const auto right = install_models(nodes_[idx].right);
      tested.insert(right.begin(), right.end());
      tested.insert(nodes_[idx].feature);
      attributes.assign(tested.begin(), tested.end());
    }
    BuildNode& node = nodes_[idx];
    node.fit = fit_linear(p_, node.rows, attributes, true);
    node.parameters = node.fit.model.parameter_count();
    return tested;
  }

  double route_unsmoothed(std::size_t idx, std::span<const double> x) const {
    while (!nodes_[idx].leaf) {
      const auto& n = nodes_[idx];
      idx = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes_[idx].fit.model.evaluate(x);
  }

  void prune(std::size_t idx) {
    BuildNode& node = nodes_[idx];
    if (node.leaf) {
      node.parameters = node.fit.model.parameter_count();
      return;
    }
    prune(node.left);
    prune(node.right);

    double sse = 0.0;
    for (const std::size_t r : node.rows) {
      const double e = route_unsmoothed(idx, p_.row(r)) - p_.target(r);
      sse += e * e;
    }
    const std::size_t n = node.rows.size();
    const double subtree_rms = std::sqrt(sse / static_cast<double>(n));
    const std::size_t subtree_params = nodes_[node.left].parameters + nodes_[node.right].parameters + 1;

    const double model_err = adjusted_error(node.fit.rms, n, node.fit.model.parameter_count());
    const double subtree_err = adjusted_error(subtree_rms, n, subtree_params);
    if (model_err <= subtree_err || model_err < root_sd_ * 1e-5) {
      node.leaf = true;
      node.parameters = node.fit.model.parameter_count();
    } else {
      node.parameters = subtree_params;
    }
  }

  M5Tree flatten() const {
    std::vector<M5Tree::Node> out;
    flatten_into(0, out);
    return M5Tree(std::move(out), p_.features(), params_.smoothing_k, p_.feature_names());
  }

  std::size_t flatten_into(std::size_t idx, std::vector<M5Tree::Node>& out) const {
    const BuildNode& b = nodes_[idx];
    const std::size_t at = out.size();
    out.push_back({b.leaf, b.feature, b.threshold, 0, 0, b.fit.model, b.rows.size()});
    if (!b.leaf) {
      const std::size_t l = flatten_into(b.left, out);
      const std::size_t r = flatten_into(b.right, out);
      out[at].left = l;
      out[at].right = r;
    }
    return at;
  }

  const TabularProblem& p_;
  TreeParams params_;
  double root_sd_ = 0.0;
  std::vector<std::size_t> all_features_;
  std::vector<BuildNode> nodes_;
};

}  // namespace

M5Tree::M5Tree(std::vector<Node> nodes, std::size_t feature_count, double smoothing_k,
               std::vector<std::string> feature_names)
    : nodes_(std::move(nodes)),
      feature_count_(feature_count),
      smoothing_k_(smoothing_k),
      names_(std::move(feature_names)) {
  if (nodes_.empty()) throw InvalidParams("M5Tree: no nodes");
  if (!(smoothing_k_ >= 0.0)) throw InvalidParams("M5Tree: negative smoothing constant");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.n < 1) throw InvalidParams("M5Tree: node with no training rows");
    for (const auto& [j, c] : n.model.coefficients) {
      if (j >= feature_count_ || !std::isfinite(c)) throw InvalidParams("M5Tree: bad model term");
    }
    if (n.leaf) continue;
    if (n.left <= i || n.right <= i || n.left >= nodes_.size() || n.right >= nodes_.size()) {
      throw InvalidParams("M5Tree: child indices must point forward");
    }
    if (n.feature >= feature_count_) throw InvalidParams("M5Tree: split feature out of range");
    if (nodes_[n.left].n + nodes_[n.right].n != n.n) {
      throw InvalidParams("M5Tree: children's counts do not sum to the parent's");
    }
  }
}

double M5Tree::predict_unsmoothed(std::span<const double> query) const {
  check_query(query, feature_count_);
  std::size_t idx = 0;
  while (!nodes_[idx].leaf) {
    const Node& n = nodes_[idx];
    idx = query[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[idx].model.evaluate(query);
}

double M5Tree::predict(std::span<const double> query) const {
  check_query(query, feature_count_);
  std::vector<std::size_t> path;
  std::size_t idx = 0;
  while (!nodes_[idx].leaf) {
    path.push_back(idx);
    const Node& n = nodes_[idx];
    idx = query[n.feature] <= n.threshold ? n.left : n.right;
  }
  double p = nodes_[idx].model.evaluate(query);
  if (smoothing_k_ == 0.0) return p;
  std::size_t child = idx;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const double q = nodes_[*it].model.evaluate(query);
    const double n = static_cast<double>(nodes_[child].n);
    p = (n * p + smoothing_k_ * q) / (n + smoothing_k_);
    child = *it;
  }
  return p;
}

std::size_t M5Tree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

void M5Tree::describe(std::ostream& out) const {
  out << "M5 model tree: " << nodes_.size() << " nodes, " << leaf_count()
      << " leaves, smoothing k=" << smoothing_k_ << "\n";
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& n = nodes_[idx];
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
    if (n.leaf) {
      out << "leaf (n=" << n.n << "): ";
      write_model(out, n.model, names_);
      out << "\n";
      continue;
    }
    const std::string name =
        n.feature < names_.size() ? names_[n.feature] : "x" + std::to_string(n.feature);
    out << name << " <= " << std::setprecision(8) << n.threshold << " (n=" << n.n << ")\n";
    stack.push_back({n.right, depth + 1});
    stack.push_back({n.left, depth + 1});
  }
}

M5Tree m5p_fit(const TabularProblem& problem, const TreeParams& params) {
  params.validate();
  if (problem.rows() < params.min_instances) {
    throw TooFewRows("M5P needs at least " + std::to_string(params.min_instances) + " rows, got " +
                     std::to_string(problem.rows()));
  }
  return M5Builder(problem, params).build();
}

double m5p_predict(const M5Tree& tree, std::span<const double> query) { return tree.predict(query); }

M5Learner::M5Learner(TreeParams params) : params_(params) { params_.validate(); }

std::unique_ptr<Model> M5Learner::fit(const TabularProblem& problem, Seed) const {
  return std::make_unique<M5Tree>(m5p_fit(problem, params_));
}

nlohmann::json M5Learner::params() const {
  auto j = params_.to_json();
  j.erase("prune_fraction");
  j.erase("seed");
  return j;
}

}  // namespace updrs
