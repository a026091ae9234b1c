#ifndef MONOSHRINK_BASELINES_HPP
#define MONOSHRINK_BASELINES_HPP

// Competing estimators for the orthonormal sequence model.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "monoshrink/regression.hpp"
#include "monoshrink/shrinkage.hpp"

namespace monoshrink {

struct BaselineEstimate {
  std::string name;
  Eigen::VectorXd beta_hat;
  /// Kept coordinates (0-based) for selection methods.
  std::optional<std::vector<Eigen::Index>> selected_support;
  /// Selected lambda, threshold, shrink factor or model size, by method.
  std::optional<double> tuning;
};

BaselineEstimate least_squares(const SequenceData& data);

/// beta_tilde / (1 + lam); the ridge solution when X^T X = I.
BaselineEstimate ridge_fixed(const SequenceData& data, double lam);

/// 50 log-spaced values over [1e-4, 1e4].
std::vector<double> default_ridge_grid();

struct RidgeCvOptions {
  std::vector<double> grid = default_ridge_grid();
  int folds = 10;
  std::uint64_t seed = 0;
};

/// k-fold cross-validated mean squared prediction error for each grid value.
/// Rows are shuffled by `seed`, then split into contiguous folds.
std::vector<double> ridge_cv_curve(const Design& design, const Eigen::VectorXd& y,
                                   const RidgeCvOptions& options);

/// Picks the grid lambda with the smallest CV error (first on ties), then refits
/// on all rows.
BaselineEstimate ridge_cv(const Design& design, const Eigen::VectorXd& y,
                          const RidgeCvOptions& options);

/// (1 - (p - 2) sigma2 / ||beta_tilde||^2)_+ beta_tilde. Requires p >= 3.
BaselineEstimate james_stein_positive(const SequenceData& data);

/// Soft thresholding with the threshold minimizing SURE over {0} U {|beta_tilde_i|}.
BaselineEstimate lasso_sure(const SequenceData& data);

/// Hard threshold at beta_tilde_i^2 > 2 sigma2 (best subset under AIC, known sigma2).
BaselineEstimate stepwise_aic(const SequenceData& data);

/// Best nested model {1..k} under AIC; smallest k on ties.
BaselineEstimate monotone_aic(const SequenceData& data);

}  // namespace monoshrink

#endif  // MONOSHRINK_BASELINES_HPP
