#include "updrs/learner.hpp"

#include <cmath>

#include "updrs/errors.hpp"

namespace updrs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(base);
  for (const auto step : path) h = splitmix64(h ^ splitmix64(step + 0x632be59bd9b4e019ULL));
  return h;
}

void check_query(std::span<const double> query, std::size_t expected_features) {
  if (query.size() != expected_features) {
    throw DimensionMismatch("query has " + std::to_string(query.size()) + " features, model expects " +
                            std::to_string(expected_features));
  }
  for (const double v : query) {
    if (!std::isfinite(v)) throw NonFiniteQuery("query contains a non-finite value");
  }
}

}  // namespace updrs
