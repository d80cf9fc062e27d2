#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "updrs/data.hpp"

namespace updrs {

using Seed = std::uint64_t;

/// Mixes a base seed with a path of indices (fold, member, node, ...) into an
/// independent stream seed. Pure function of its arguments.
Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> path) noexcept;

/// A fitted regression model. Implementations are immutable after fitting and
/// `predict` may be called concurrently.
class Model {
 public:
  virtual ~Model() = default;
  virtual double predict(std::span<const double> query) const = 0;
  virtual std::size_t feature_count() const noexcept = 0;
  /// Human-readable dump, one node or component per line.
  virtual void describe(std::ostream& out) const = 0;
};

/// Something that fits a Model. `fit` is deterministic in (problem, seed);
/// learners that use no randomness ignore the seed.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Model> fit(const TabularProblem& problem, Seed seed) const = 0;
  virtual nlohmann::json params() const = 0;
};

using LearnerPtr = std::shared_ptr<const Learner>;

/// Throws DimensionMismatch / NonFiniteQuery for unusable queries.
void check_query(std::span<const double> query, std::size_t expected_features);

}  // namespace updrs
