#pragma once

#include <cstddef>

#include <json.hpp>

#include "updrs/learner.hpp"

namespace updrs {

/// Hyperparameters shared by the tree learners.
struct TreeParams {
  std::size_t min_instances = 4;
  double sd_stop_fraction = 0.05;
  double smoothing_k = 15.0;  // M5 only
  bool prune = true;
  double prune_fraction = 1.0 / 3.0;  // REPTree only
  Seed seed = 1;                      // REPTree grow/prune shuffle

  static TreeParams m5_defaults() { return {}; }
  static TreeParams reptree_defaults() {
    TreeParams p;
    p.min_instances = 2;
    return p;
  }

  /// Throws InvalidParams.
  void validate() const;
  nlohmann::json to_json() const;
};

}  // namespace updrs
