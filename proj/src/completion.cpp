#include "lingbase/completion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "lingbase/rng.hpp"

namespace lingbase {

IncompleteRealMatrix IncompleteRealMatrix::from_feature_matrix(const FeatureMatrix& m) {
  IncompleteRealMatrix x;
  x.rows = m.rows();
  x.cols = m.cols();
  x.values = m.cells;
  for (std::uint32_t i = 0; i < x.rows; ++i) {
    for (std::uint32_t j = 0; j < x.cols; ++j) {
      if (x.at(i, j).has_value()) x.observed.emplace_back(i, j);
    }
  }
  return x;
}

std::pair<FeatureMatrix, HoldoutMask> make_holdout(const FeatureMatrix& m, double fraction,
                                                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InputError("make_holdout: fraction must lie strictly between 0 and 1");
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> observed;
  for (std::uint32_t i = 0; i < m.rows(); ++i) {
    for (std::uint32_t j = 0; j < m.cols(); ++j) {
      if (m.at(i, j).has_value()) observed.emplace_back(i, j);
    }
  }
  if (observed.size() < 5) {
    throw InputError("make_holdout: need at least 5 observed cells, have " +
                     std::to_string(observed.size()));
  }
  const auto k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(observed.size())));
  if (k == 0) throw InputError("make_holdout: fraction hides no cells");
  if (k >= observed.size()) {
    throw InputError("make_holdout: fraction hides every observed cell");
  }

  rng::Stream stream(seed, "holdout");
  stream.shuffle(observed);
  observed.resize(k);
  std::sort(observed.begin(), observed.end());

  HoldoutMask mask;
  mask.fraction = fraction;
  mask.seed = seed;
  FeatureMatrix masked = m;
  for (const auto& [i, j] : observed) {
    mask.hidden.push_back({i, j, *m.at(i, j)});
    masked.at(i, j) = std::nullopt;
  }
  return {std::move(masked), std::move(mask)};
}

namespace {

// Thin SVD with a fixed sign convention: the largest-magnitude entry
// of every left singular vector is non-negative.
void thin_svd(const Eigen::MatrixXd& w, Eigen::MatrixXd& u, Eigen::VectorXd& sigma,
              Eigen::MatrixXd& v) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = svd.matrixU();
  sigma = svd.singularValues();
  v = svd.matrixV();
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index arg = 0;
    u.col(k).cwiseAbs().maxCoeff(&arg);
    if (u(arg, k) < 0.0) {
      u.col(k) = -u.col(k);
      v.col(k) = -v.col(k);
    }
  }
}

double sigma_max_zero_filled(const IncompleteRealMatrix& x) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.rows),
                                            static_cast<Eigen::Index>(x.cols));
  for (const auto& [i, j] : x.observed) w(i, j) = *x.at(i, j);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(w).singularValues()(0);
}

struct Iterate {
  Eigen::MatrixXd z;
  std::size_t iterations = 0;
  bool converged = false;
};

// The core loop over an explicit observed set, reusable with a warm
// start. `observer` sees the objective of every iterate.
Iterate run_soft_impute(const IncompleteRealMatrix& x,
                        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
                        double lambda, double tolerance, std::size_t max_iterations,
                        Eigen::MatrixXd z, const IterationObserver& observer) {
  const auto rows = static_cast<Eigen::Index>(x.rows);
  const auto cols = static_cast<Eigen::Index>(x.cols);
  Iterate it;

  Eigen::MatrixXd w(rows, cols);
  Eigen::MatrixXd u, v;
  Eigen::VectorXd sigma;
  while (it.iterations < max_iterations) {
    w = z;
    for (const auto& [i, j] : observed) w(i, j) = *x.at(i, j);
    thin_svd(w, u, sigma, v);
    const Eigen::VectorXd kept = (sigma.array() - lambda).max(0.0).matrix();
    Eigen::MatrixXd next = u * kept.asDiagonal() * v.transpose();
    ++it.iterations;

    if (observer) {
      double fit = 0.0;
      for (const auto& [i, j] : observed) {
        const double e = *x.at(i, j) - next(i, j);
        fit += e * e;
      }
      observer(it.iterations, 0.5 * fit + lambda * kept.sum());
    }

    const double delta = (next - z).squaredNorm();
    const double base = z.squaredNorm();
    z = std::move(next);
    if (delta == 0.0 || (base > 0.0 && delta / base <= tolerance)) {
      it.converged = true;
      break;
    }
  }
  it.z = std::move(z);
  return it;
}

std::vector<double> dense_with_observed(const IncompleteRealMatrix& x,
                                        const Eigen::MatrixXd& z) {
  std::vector<double> out(x.rows * x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      out[i * x.cols + j] = z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  for (const auto& [i, j] : x.observed) out[i * x.cols + j] = *x.at(i, j);
  return out;
}

std::vector<double> auto_grid(const IncompleteRealMatrix& x) {
  const double top = sigma_max_zero_filled(x);
  if (top <= 0.0) return {0.0};
  std::vector<double> grid;
  grid.reserve(10);
  for (int k = 0; k < 10; ++k) {
    grid.push_back(top * std::pow(0.01, static_cast<double>(k) / 9.0));
  }
  return grid;
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0) throw Error("soft_impute_path: negative lambda in grid");
    if (i > 0 && !(grid[i] < grid[i - 1])) {
      throw Error("soft_impute_path: lambda grid must be strictly descending");
    }
  }
}

}  // namespace

SoftImputeResult soft_impute(const IncompleteRealMatrix& x, double lambda, double tolerance,
                             std::size_t max_iterations, const IterationObserver& observer) {
  if (x.observed.empty()) throw Error("soft_impute: no observed cells");
  if (lambda < 0.0) throw Error("soft_impute: lambda must be non-negative");
  if (!(tolerance > 0.0)) throw Error("soft_impute: tolerance must be positive");
  if (max_iterations < 1) throw Error("soft_impute: max_iterations must be positive");

  auto it = run_soft_impute(
      x, x.observed, lambda, tolerance, max_iterations,
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.rows),
                            static_cast<Eigen::Index>(x.cols)),
      observer);
  SoftImputeResult result;
  result.rows = x.rows;
  result.cols = x.cols;
  result.iterations = it.iterations;
  result.converged = it.converged;
  result.completed = dense_with_observed(x, it.z);
  return result;
}

PathResult soft_impute_path(const IncompleteRealMatrix& x, const CompletionConfig& config) {
  if (x.observed.empty()) throw Error("soft_impute_path: no observed cells");
  if (!(config.tolerance > 0.0)) throw Error("soft_impute_path: tolerance must be positive");
  if (config.max_iterations < 1) {
    throw Error("soft_impute_path: max_iterations must be positive");
  }
  if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
    throw Error("soft_impute_path: validation_fraction must lie in (0,1)");
  }

  std::vector<double> grid = config.lambda_grid;
  if (grid.empty()) {
    grid = auto_grid(x);
  } else {
    check_grid(grid);
  }

  const auto rows = static_cast<Eigen::Index>(x.rows);
  const auto cols = static_cast<Eigen::Index>(x.cols);
  PathResult result;
  result.rows = x.rows;
  result.cols = x.cols;
  result.grid = grid;

  // Validation split of the observed cells; singleton grids still get
  // scored so the reported RMSE means the same thing on every path.
  const std::size_t n_obs = x.observed.size();
  if (n_obs < 2) throw Error("soft_impute_path: need at least 2 observed cells");
  std::size_t n_val = static_cast<std::size_t>(
      std::llround(config.validation_fraction * static_cast<double>(n_obs)));
  n_val = std::clamp<std::size_t>(n_val, 1, n_obs - 1);

  std::vector<std::size_t> order(n_obs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::Stream stream(config.seed, "path-val");
  stream.shuffle(order);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> val_cells, fit_cells;
  val_cells.reserve(n_val);
  fit_cells.reserve(n_obs - n_val);
  for (std::size_t k = 0; k < n_obs; ++k) {
    (k < n_val ? val_cells : fit_cells).push_back(x.observed[order[k]]);
  }
  std::sort(val_cells.begin(), val_cells.end());
  std::sort(fit_cells.begin(), fit_cells.end());

  std::size_t best = 0;
  double best_rmse = 0.0;
  Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto it = run_soft_impute(x, fit_cells, grid[g], config.tolerance, config.max_iterations,
                              warm, nullptr);
    double se = 0.0;
    for (const auto& [i, j] : val_cells) {
      const double e = *x.at(i, j) - it.z(i, j);
      se += e * e;
    }
    const double rmse = std::sqrt(se / static_cast<double>(val_cells.size()));
    if (g == 0 || rmse < best_rmse) {
      best = g;
      best_rmse = rmse;
    }
    warm = std::move(it.z);
  }

  result.lambda_chosen = grid[best];
  result.validation_rmse = best_rmse;

  auto refit = run_soft_impute(x, x.observed, grid[best], config.tolerance,
                               config.max_iterations, Eigen::MatrixXd::Zero(rows, cols),
                               nullptr);
  result.iterations = refit.iterations;
  result.converged = refit.converged;
  result.completed = dense_with_observed(x, refit.z);
  return result;
}

namespace {

FeatureMatrix complete_impl(const FeatureMatrix& m, const CompletionConfig& config,
                            bool threshold) {
  const auto x = IncompleteRealMatrix::from_feature_matrix(m);
  const auto path = soft_impute_path(x, config);
  FeatureMatrix out = m;
  out.mode = threshold ? MatrixMode::Binary : MatrixMode::Continuous;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m.at(i, j).has_value()) continue;
      const double v = std::clamp(path.at(i, j), 0.0, 1.0);
      out.at(i, j) = threshold ? (v >= 0.5 ? 1.0 : 0.0) : v;
    }
  }
  return out;
}

}  // namespace

FeatureMatrix complete_binary(const FeatureMatrix& m, const CompletionConfig& config) {
  if (m.mode != MatrixMode::Binary) throw Error("complete_binary: matrix must be binary");
  return complete_impl(m, config, true);
}

FeatureMatrix complete_continuous(const FeatureMatrix& m, const CompletionConfig& config) {
  return complete_impl(m, config, false);
}

}  // namespace lingbase
