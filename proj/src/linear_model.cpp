#include "updrs/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "updrs/errors.hpp"
#include "updrs/numeric.hpp"

namespace updrs {

namespace {

constexpr double kRidge = 1e-8;

/// Centred, standardised cross-products of the candidate columns and the
/// target over a row subset. Subsets are solved from these without touching
/// the rows again.
struct Moments {
  std::size_t n = 0;
  std::vector<std::size_t> columns;  // non-constant candidate attributes
  std::vector<double> mean;
  std::vector<double> norm;  // sqrt of centred sum of squares
  double y_mean = 0.0;
  double y_ss = 0.0;         // centred target sum of squares
  Eigen::MatrixXd gram;      // unit diagonal
  Eigen::VectorXd xy;
};

Moments compute_moments(const TabularProblem& p, std::span<const std::size_t> rows,
                        std::span<const std::size_t> attributes) {
  Moments m;
  m.n = rows.size();
  const double n = static_cast<double>(m.n);

  std::vector<double> ys(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = p.target(rows[i]);
  m.y_mean = compensated_mean(ys);
  for (double& y : ys) y -= m.y_mean;
  CompensatedSum yss;
  for (double y : ys) yss.add(y * y);
  m.y_ss = yss.value();

  for (const std::size_t j : attributes) {
    CompensatedSum s;
    for (const std::size_t r : rows) s.add(p.at(r, j));
    const double mu = s.value() / n;
    CompensatedSum ss;
    for (const std::size_t r : rows) {
      const double d = p.at(r, j) - mu;
      ss.add(d * d);
    }
    if (ss.value() > 0.0) {
      m.columns.push_back(j);
      m.mean.push_back(mu);
      m.norm.push_back(std::sqrt(ss.value()));
    }
  }

  const std::size_t k = m.columns.size();
  m.gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  m.xy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  std::vector<double> z(k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      z[a] = (p.at(rows[i], m.columns[a]) - m.mean[a]) / m.norm[a];
    }
    for (std::size_t a = 0; a < k; ++a) {
      const auto ia = static_cast<Eigen::Index>(a);
      m.xy(ia) += z[a] * ys[i];
      for (std::size_t b = a; b < k; ++b) m.gram(ia, static_cast<Eigen::Index>(b)) += z[a] * z[b];
    }
  }
  m.gram.triangularView<Eigen::StrictlyLower>() = m.gram.transpose();
  return m;
}

struct SubsetSolution {
  Eigen::VectorXd beta;  // standardised coefficients, aligned with `active`
  double sse = 0.0;
};

SubsetSolution solve_subset(const Moments& m, const std::vector<std::size_t>& active) {
  const auto k = static_cast<Eigen::Index>(active.size());
  SubsetSolution s;
  if (k == 0) {
    s.sse = m.y_ss;
    return s;
  }
  Eigen::MatrixXd a(k, k);
  Eigen::VectorXd b(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    b(r) = m.xy(static_cast<Eigen::Index>(active[r]));
    for (Eigen::Index c = 0; c < k; ++c) {
      a(r, c) = m.gram(static_cast<Eigen::Index>(active[r]), static_cast<Eigen::Index>(active[c]));
    }
  }
  const double lambda = kRidge * a.trace() / static_cast<double>(k);
  Eigen::MatrixXd damped = a;
  damped.diagonal().array() += lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
  Eigen::VectorXd beta = ldlt.solve(b);
  beta += ldlt.solve(b - a * beta);  // removes most of the ridge bias
  if (!beta.allFinite()) beta.setZero();

  s.sse = std::max(0.0, m.y_ss - 2.0 * beta.dot(b) + beta.dot(a * beta));
  s.beta = std::move(beta);
  return s;
}

}  // namespace

double adjusted_error(double rms, std::size_t n, std::size_t parameters) noexcept {
  if (n <= parameters) return std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  const double v = static_cast<double>(parameters);
  return rms * (nn + v) / (nn - v);
}

LinearFit fit_linear(const TabularProblem& problem, std::span<const std::size_t> rows,
                     std::span<const std::size_t> attributes, bool simplify) {
  if (rows.empty()) throw EmptyInput("fit_linear: no rows");
  for (const std::size_t j : attributes) {
    if (j >= problem.features()) throw DimensionMismatch("fit_linear: attribute index out of range");
  }

  const Moments m = compute_moments(problem, rows, attributes);
  const auto rms_of = [&](const SubsetSolution& s) {
    return std::sqrt(s.sse / static_cast<double>(m.n));
  };

  std::vector<std::size_t> active(m.columns.size());
  for (std::size_t a = 0; a < active.size(); ++a) active[a] = a;
  SubsetSolution current = solve_subset(m, active);

  if (simplify) {
    double current_err = adjusted_error(rms_of(current), m.n, active.size() + 1);
    while (!active.empty()) {
      std::size_t best_drop = active.size();
      double best_err = std::numeric_limits<double>::infinity();
      SubsetSolution best;
      for (std::size_t d = 0; d < active.size(); ++d) {
        std::vector<std::size_t> trial = active;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(d));
        SubsetSolution s = solve_subset(m, trial);
        const double err = adjusted_error(rms_of(s), m.n, trial.size() + 1);
        if (best_drop == active.size() || err < best_err) {
          best_drop = d;
          best_err = err;
          best = std::move(s);
        }
      }
      if (!(best_err <= current_err || std::isinf(current_err))) break;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_drop));
      current = std::move(best);
      current_err = best_err;
    }
  }

  LinearFit fit;
  double intercept = m.y_mean;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t col = active[a];
    const double coef = current.beta(static_cast<Eigen::Index>(a)) / m.norm[col];
    if (coef == 0.0) continue;
    fit.model.coefficients.emplace_back(m.columns[col], coef);
    intercept -= coef * m.mean[col];
  }
  fit.model.intercept = intercept;
  std::sort(fit.model.coefficients.begin(), fit.model.coefficients.end());

  CompensatedSum sse;
  for (const std::size_t r : rows) {
    const double e = problem.target(r) - fit.model.evaluate(problem.row(r));
    sse.add(e * e);
  }
  fit.rms = std::sqrt(sse.value() / static_cast<double>(m.n));
  return fit;
}

}  // namespace updrs
