#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "updrs/errors.hpp"
#include "updrs/metrics.hpp"

using namespace updrs;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("pearson on perfect linear relations") {
  const std::vector<double> x{1, 2, 3};
  CHECK(*pearson(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*pearson(x, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("pearson signals undefined correlation for constant input") {
  CHECK_FALSE(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}).has_value());
  CHECK_FALSE(pearson(std::vector<double>{4, 4}, std::vector<double>{1, 2}).has_value());
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), LengthMismatch);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), LengthMismatch);
}

TEST_CASE("pearson symmetry, sign and affine invariance") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_vector(rng, 30);
    const auto y = random_vector(rng, 30);
    const double r = *pearson(x, y);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(*pearson(y, x) == doctest::Approx(r).epsilon(1e-14));
    std::vector<double> xs(x.size()), neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs[i] = 3.5 * x[i] + 100.0;
      neg[i] = -0.25 * x[i] + 1.0;
    }
    CHECK(*pearson(xs, y) == doctest::Approx(r).epsilon(1e-12));
    CHECK(*pearson(x, xs) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("pearson matches the definitional oracle") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> len(2, 200);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = len(rng);
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    CHECK(std::abs(*pearson(x, y) - *oracle::pearson(x, y)) <= 1e-12);
  }
}

TEST_CASE("mae arithmetic and invariants") {
  CHECK(mae(std::vector<double>{1, 2}, std::vector<double>{2, 4}) == 1.5);
  CHECK(mae(std::vector<double>{3, 3}, std::vector<double>{3, 3}) == 0.0);
  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), LengthMismatch);
  CHECK_THROWS_AS(mae(std::vector<double>{1}, std::vector<double>{1, 2}), LengthMismatch);
  std::mt19937_64 rng(5);
  const auto p = random_vector(rng, 50);
  const auto a = random_vector(rng, 50);
  CHECK(mae(p, a) == doctest::Approx(mae(a, p)).epsilon(1e-15));
  auto ps = p, as = a;
  for (auto& v : ps) v += 7.0;
  for (auto& v : as) v += 7.0;
  CHECK(mae(ps, as) == doctest::Approx(mae(p, a)).epsilon(1e-12));
}

TEST_CASE("rank_features matches the oracle on random matrices") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 50; ++i) rows.push_back(random_vector(rng, 5));
    const auto y = random_vector(rng, 50);
    const auto problem = TabularProblem::from_rows(rows, y);
    const auto ranking = rank_features(problem);
    REQUIRE(ranking.entries.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& e = ranking.entries[i];
      const auto expected = oracle::pearson(problem.column(e.column), y);
      CHECK(std::abs(*e.correlation - *expected) <= 1e-12);
      if (i > 0) CHECK(*ranking.entries[i - 1].correlation >= *e.correlation);
    }
  }
}

TEST_CASE("rank_features puts an exact copy of the target first") {
  const std::vector<double> y{1, 4, 2, 8, 5};
  const auto problem = TabularProblem::from_rows({{0.1, 1}, {0.5, 4}, {0.2, 2}, {0.3, 8}, {0.9, 5}}, y);
  const auto ranking = rank_features(problem);
  CHECK(ranking.entries[0].name == "x1");
  CHECK(*ranking.entries[0].correlation == doctest::Approx(1.0));
}

TEST_CASE("rank_features flags constant columns and keeps column order on ties") {
  const auto problem = TabularProblem::from_rows({{1, 3, 1}, {1, 5, 2}, {1, 7, 3}}, {10, 20, 30});
  const auto ranking = rank_features(problem);
  CHECK(ranking.entries[0].column == 1);
  CHECK(ranking.entries[1].column == 2);
  CHECK(ranking.entries[2].column == 0);
  CHECK_FALSE(ranking.entries[2].correlation.has_value());
}

TEST_CASE("classification tally") {
  using S = SeverityClass;
  const std::vector<S> a{S::Mild, S::Moderate, S::Mild};
  const auto same = classification_tally(a, a);
  CHECK(same.accuracy == 1.0);
  CHECK(same.confusion[0][0] == 2);
  CHECK(same.confusion[1][1] == 1);
  const auto wrong = classification_tally(std::vector<S>{S::Mild, S::Moderate},
                                          std::vector<S>{S::Moderate, S::Mild});
  CHECK(wrong.accuracy == 0.0);
  CHECK_THROWS_AS(classification_tally(std::vector<S>{}, std::vector<S>{}), LengthMismatch);

  std::vector<S> actual(5254, S::Mild);
  actual.insert(actual.end(), 621, S::Moderate);
  const std::vector<S> all_mild(actual.size(), S::Mild);
  CHECK(classification_tally(all_mild, actual).accuracy == doctest::Approx(5254.0 / 5875.0));
}
