#include "monoshrink/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "monoshrink/rng.hpp"

namespace monoshrink {

BaselineEstimate least_squares(const SequenceData& data) {
  data.validate();
  return {"least_squares", data.beta_tilde, std::nullopt, std::nullopt};
}

BaselineEstimate ridge_fixed(const SequenceData& data, double lam) {
  data.validate();
  if (std::isnan(lam) || lam < 0.0) throw InvalidArgument("ridge_fixed: lambda must be >= 0");
  const double factor = std::isinf(lam) ? 0.0 : 1.0 / (1.0 + lam);
  return {"ridge_fixed", factor * data.beta_tilde, std::nullopt, lam};
}

std::vector<double> default_ridge_grid() {
  constexpr int kPoints = 50;
  std::vector<double> grid(kPoints);
  for (int k = 0; k < kPoints; ++k)
    grid[k] = std::pow(10.0, -4.0 + 8.0 * double(k) / double(kPoints - 1));
  return grid;
}

namespace {

void check_cv_inputs(const Design& design, const Eigen::VectorXd& y,
                     const RidgeCvOptions& options) {
  if (options.grid.empty()) throw InvalidArgument("ridge_cv: empty lambda grid");
  for (double lam : options.grid)
    if (!(lam >= 0.0) || !std::isfinite(lam))
      throw InvalidArgument("ridge_cv: grid values must be finite and >= 0");
  const Eigen::Index n = design.rows();
  if (options.folds < 2 || options.folds > n)
    throw InvalidArgument("ridge_cv: folds must lie in [2, n]");
  if (y.size() != n) throw InvalidArgument("ridge_cv: response length does not match design");
}

}  // namespace

std::vector<double> ridge_cv_curve(const Design& design, const Eigen::VectorXd& y,
                                   const RidgeCvOptions& options) {
  check_cv_inputs(design, y, options);
  const Eigen::MatrixXd& x = design.x;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  Engine rng(derive_seed(options.seed, 0));
  const std::vector<std::size_t> perm = permutation(static_cast<std::size_t>(n), rng);
  const Eigen::VectorXd xty = x.transpose() * y;

  // With orthonormal columns the training Gram matrix is I - V^T V, V being the
  // held-out rows. Woodbury reduces each ridge solve to the eigenproblem of the
  // small matrix V V^T = Q D Q^T: held-out predictions are
  //   V beta(lam) = Q diag(1 / (1 + lam - d)) Q^T V b_train.
  std::vector<double> sse(options.grid.size(), 0.0);
  for (int fold = 0; fold < options.folds; ++fold) {
    const Eigen::Index lo = n * fold / options.folds;
    const Eigen::Index hi = n * (fold + 1) / options.folds;
    const Eigen::Index m = hi - lo;
    if (m == 0) continue;

    Eigen::MatrixXd v(m, p);
    Eigen::VectorXd yv(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto row = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(lo + r)]);
      v.row(r) = x.row(row);
      yv[r] = y[row];
    }
    const Eigen::VectorXd b_train = xty - v.transpose() * yv;
    const Eigen::MatrixXd gram = v * v.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd d = eig.eigenvalues();
    const Eigen::VectorXd qu = eig.eigenvectors().transpose() * (v * b_train);

    for (std::size_t k = 0; k < options.grid.size(); ++k) {
      const double c = 1.0 + options.grid[k];
      Eigen::VectorXd scaled(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const double gap = c - d[j];
        // Direction carried only by held-out rows: minimum-norm fit is zero there.
        scaled[j] = gap > 1e-12 * c ? qu[j] / gap : 0.0;
      }
      const Eigen::VectorXd pred = eig.eigenvectors() * scaled;
      sse[k] += (yv - pred).squaredNorm();
    }
  }
  for (double& e : sse) e /= double(n);
  return sse;
}

BaselineEstimate ridge_cv(const Design& design, const Eigen::VectorXd& y,
                          const RidgeCvOptions& options) {
  const std::vector<double> curve = ridge_cv_curve(design, y, options);
  const auto best = std::min_element(curve.begin(), curve.end()) - curve.begin();
  const double lam = options.grid[static_cast<std::size_t>(best)];
  SequenceData data{design.x.transpose() * y, 1.0};
  BaselineEstimate est = ridge_fixed(data, lam);
  est.name = "ridge_cv";
  return est;
}

BaselineEstimate james_stein_positive(const SequenceData& data) {
  data.validate();
  const Eigen::Index p = data.size();
  if (p < 3) throw InvalidArgument("james_stein_positive: requires p >= 3");
  const double ss = data.beta_tilde.squaredNorm();
  const double factor = ss > 0.0 ? std::max(0.0, 1.0 - double(p - 2) * data.sigma2 / ss) : 0.0;
  return {"james_stein", factor * data.beta_tilde, std::nullopt, factor};
}

BaselineEstimate lasso_sure(const SequenceData& data) {
  data.validate();
  const Eigen::Index p = data.size();
  const double s2 = data.sigma2;

  std::vector<double> mags(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) mags[static_cast<std::size_t>(i)] = std::abs(data.beta_tilde[i]);
  std::sort(mags.begin(), mags.end());

  // SURE(t) = sum_i [s2 - 2 s2 1(|b_i| <= t) + min(b_i^2, t^2)] evaluated at
  // t = 0 and t = mags[k]; prefix sums make each evaluation O(1) after the
  // group of ties at t is consumed.
  auto evaluate = [&](double t, std::size_t at_or_below, double sq_below) {
    const double above = double(mags.size() - at_or_below);
    return double(p) * s2 - 2.0 * s2 * double(at_or_below) + sq_below + above * t * t;
  };

  std::size_t zeros = 0;
  while (zeros < mags.size() && mags[zeros] == 0.0) ++zeros;
  double best_t = 0.0;
  double best = evaluate(0.0, zeros, 0.0);

  double sq_below = 0.0;
  std::size_t k = 0;
  while (k < mags.size()) {
    const double t = mags[k];
    std::size_t j = k;
    while (j < mags.size() && mags[j] == t) {
      sq_below += t * t;
      ++j;
    }
    const double value = evaluate(t, j, sq_below);
    if (value < best) {
      best = value;
      best_t = t;
    }
    k = j;
  }

  Eigen::VectorXd beta_hat(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double b = data.beta_tilde[i];
    const double mag = std::max(0.0, std::abs(b) - best_t);
    beta_hat[i] = b < 0.0 ? -mag : (b > 0.0 ? mag : 0.0);
  }
  return {"lasso_sure", beta_hat, std::nullopt, best_t};
}

BaselineEstimate stepwise_aic(const SequenceData& data) {
  data.validate();
  const Eigen::Index p = data.size();
  Eigen::VectorXd beta_hat = Eigen::VectorXd::Zero(p);
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double b = data.beta_tilde[i];
    if (b * b > 2.0 * data.sigma2) {
      beta_hat[i] = b;
      support.push_back(i);
    }
  }
  const double k = double(support.size());
  return {"stepwise_aic", beta_hat, std::move(support), k};
}

BaselineEstimate monotone_aic(const SequenceData& data) {
  data.validate();
  const Eigen::Index p = data.size();
  double criterion = 0.0;
  double best = 0.0;
  Eigen::Index best_k = 0;
  for (Eigen::Index k = 1; k <= p; ++k) {
    const double b = data.beta_tilde[k - 1];
    criterion += 2.0 * data.sigma2 - b * b;
    if (criterion < best) {
      best = criterion;
      best_k = k;
    }
  }
  Eigen::VectorXd beta_hat = Eigen::VectorXd::Zero(p);
  beta_hat.head(best_k) = data.beta_tilde.head(best_k);
  std::vector<Eigen::Index> support(static_cast<std::size_t>(best_k));
  std::iota(support.begin(), support.end(), Eigen::Index{0});
  return {"monotone_aic", beta_hat, std::move(support), double(best_k)};
}

}  // namespace monoshrink
