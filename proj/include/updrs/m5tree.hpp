#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "updrs/data.hpp"
#include "updrs/learner.hpp"
#include "updrs/linear_model.hpp"
#include "updrs/tree_params.hpp"

namespace updrs {

/// M5 model tree: a standard-deviation-reduction regression tree whose nodes
/// all carry a linear model. Predictions come from the routed leaf's model,
/// smoothed along the path back to the root.
class M5Tree final : public Model {
 public:
  struct Node {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;   // node indices, valid when !leaf
    std::size_t right = 0;
    LinearModel model;
    std::size_t n = 0;      // training rows that reached the node
  };

  /// Nodes are indexed; node 0 is the root. Checks structural invariants.
  M5Tree(std::vector<Node> nodes, std::size_t feature_count, double smoothing_k,
         std::vector<std::string> feature_names = {});

  double predict(std::span<const double> query) const override;
  /// The routed leaf's own model, without smoothing.
  double predict_unsmoothed(std::span<const double> query) const;

  std::size_t feature_count() const noexcept override { return feature_count_; }
  void describe(std::ostream& out) const override;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const noexcept;
  double smoothing_k() const noexcept { return smoothing_k_; }

 private:
  std::vector<Node> nodes_;
  std::size_t feature_count_;
  double smoothing_k_;
  std::vector<std::string> names_;
};

/// Throws TooFewRows when the problem has fewer than min_instances rows.
M5Tree m5p_fit(const TabularProblem& problem, const TreeParams& params = TreeParams::m5_defaults());

double m5p_predict(const M5Tree& tree, std::span<const double> query);

class M5Learner final : public Learner {
 public:
  explicit M5Learner(TreeParams params = TreeParams::m5_defaults());
  std::string name() const override { return "M5P"; }
  std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const override;
  nlohmann::json params() const override;

 private:
  TreeParams params_;
};

}  // namespace updrs
