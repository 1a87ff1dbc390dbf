#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "lingbase/core.hpp"

namespace lingbase {

struct IncompleteRealMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Cell> values;  // row-major
  // observed positions in row-major order, kept in sync with values
  std::vector<std::pair<std::uint32_t, std::uint32_t>> observed;

  const Cell& at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  Cell& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }

  static IncompleteRealMatrix from_feature_matrix(const FeatureMatrix& m);
};

struct CompletionConfig {
  // Descending non-negative weights; empty = geometric 10-point grid
  // from sigma_max of the zero-filled matrix down to sigma_max/100.
  std::vector<double> lambda_grid;
  // Tight enough that small-lambda refits on noiseless low-rank data
  // stop at the solution rather than en route to it.
  double tolerance = 1e-9;
  std::size_t max_iterations = 2000;
  double validation_fraction = 0.20;
  std::uint64_t seed = 0;
};

struct HoldoutMask {
  struct Hidden {
    std::uint32_t row = 0, col = 0;
    double value = 0.0;
  };
  std::vector<Hidden> hidden;  // sorted by (row, col)
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Hides round(fraction * observed) uniformly chosen observed cells.
/// The mask keeps their true values for scoring.
std::pair<FeatureMatrix, HoldoutMask> make_holdout(const FeatureMatrix& m, double fraction,
                                                   std::uint64_t seed);

struct SoftImputeResult {
  std::vector<double> completed;  // dense row-major, observed cells restored
  std::size_t rows = 0, cols = 0;
  std::size_t iterations = 0;
  bool converged = false;

  double at(std::size_t i, std::size_t j) const { return completed[i * cols + j]; }
};

/// Observer for the iterate sequence: (iteration, objective) where
/// objective = 0.5*|P_obs(X - Z)|_F^2 + lambda*|Z|_*.
using IterationObserver = std::function<void(std::size_t, double)>;

/// Soft-thresholded SVD iteration Z <- SVT_lambda(P_obs(X) + P_unobs(Z))
/// from Z = 0. Stops when the relative squared Frobenius change drops
/// to `tolerance` or after `max_iterations`. Observed cells of the
/// result are the input values verbatim; non-convergence only clears
/// the flag.
SoftImputeResult soft_impute(const IncompleteRealMatrix& x, double lambda, double tolerance,
                             std::size_t max_iterations,
                             const IterationObserver& observer = nullptr);

struct PathResult {
  std::vector<double> completed;  // dense row-major, observed cells restored
  std::size_t rows = 0, cols = 0;
  double lambda_chosen = 0.0;
  double validation_rmse = 0.0;
  std::vector<double> grid;  // grid actually walked
  std::size_t iterations = 0;  // final refit
  bool converged = false;      // final refit

  double at(std::size_t i, std::size_t j) const { return completed[i * cols + j]; }
};

/// Walks the descending lambda grid with warm starts, scoring each
/// lambda on a held-out validation split of the observed cells, then
/// refits from scratch on every observed cell at the winner (ties keep
/// the larger lambda).
PathResult soft_impute_path(const IncompleteRealMatrix& x, const CompletionConfig& config);

/// Completion for binary matrices: fills unobserved cells with the
/// path solution clamped to [0,1] and thresholded at 0.5 (ties -> 1).
/// Observed cells pass through untouched.
FeatureMatrix complete_binary(const FeatureMatrix& m, const CompletionConfig& config);

/// Same pipeline without thresholding; output is continuous-mode with
/// filled cells clamped to [0,1].
FeatureMatrix complete_continuous(const FeatureMatrix& m, const CompletionConfig& config);

}  // namespace lingbase
