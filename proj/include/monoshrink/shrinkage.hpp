#ifndef MONOSHRINK_SHRINKAGE_HPP
#define MONOSHRINK_SHRINKAGE_HPP

// Monotone empirical-Bayes shrinkage in the orthonormal sequence model
//   beta_tilde_i ~ N(beta_i, sigma2),  beta_i ~ N(0, sigma_i^2),
//   sigma_1^2 >= ... >= sigma_p^2 >= 0.
//
// The fitted prior variances are the PAV fit of beta_tilde_i^2 - sigma2
// clamped at zero; they simultaneously maximize the marginal likelihood and
// minimize SURE over the monotone cone.

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "monoshrink/error.hpp"
#include "monoshrink/pav.hpp"

namespace monoshrink {

/// Least squares coefficients beta_tilde = X^T Y and the noise variance.
struct SequenceData {
  Eigen::VectorXd beta_tilde;
  double sigma2 = 1.0;

  Eigen::Index size() const { return beta_tilde.size(); }
  void validate() const;
};

struct MonotoneFit {
  Eigen::VectorXd prior_variances;
  Eigen::VectorXd shrink_factors;
  Eigen::VectorXd beta_hat;
  /// PAV partition of beta_tilde^2 - sigma2, before clamping at zero.
  BlockPartition<double> blocks;
  double sure_value = 0.0;
  /// Negative log marginal likelihood without the p*log(2*pi) constant.
  double objective_value = 0.0;
};

struct VarianceFit {
  double sigma2_hat = 0.0;
  Eigen::VectorXd prior_variances;
  Eigen::VectorXd tau2;
};

/// Fixed monotone shrinkage rule with the smallest Bayes risk.
struct BestMonotoneRule {
  Eigen::VectorXd lambda;
  Eigen::VectorXd shrink_factors;
  double risk = 0.0;
};

namespace detail {

template <typename Derived>
void require_nonnegative(const Eigen::MatrixBase<Derived>& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::isnan(v[i]) || v[i] < 0)
      throw InvalidArgument(std::string(what) + ": entries must be >= 0");
}

inline void require_positive_variance(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw InvalidArgument("sigma2 must be positive and finite");
}

template <typename A, typename B>
void require_same_length(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                         const char* what) {
  if (a.size() != b.size()) throw InvalidArgument(std::string(what) + ": length mismatch");
}

/// lambda / (lambda + sigma2), with lambda = +inf mapping to 1.
template <typename Scalar>
Scalar shrink_factor(Scalar lambda, Scalar sigma2) {
  if (std::isinf(lambda)) return Scalar(1);
  return lambda / (lambda + sigma2);
}

/// sigma2 / (sigma2 + lambda).
template <typename Scalar>
Scalar residual_factor(Scalar lambda, Scalar sigma2) {
  if (std::isinf(lambda)) return Scalar(0);
  return sigma2 / (sigma2 + lambda);
}

}  // namespace detail

/// beta_hat_i = lambda_i / (lambda_i + sigma2) * beta_tilde_i. lambda need not be monotone.
template <typename DerivedB, typename DerivedL>
Vec<typename DerivedB::Scalar> shrink(const Eigen::MatrixBase<DerivedB>& beta_tilde,
                                      const Eigen::MatrixBase<DerivedL>& lambda,
                                      typename DerivedB::Scalar sigma2) {
  using Scalar = typename DerivedB::Scalar;
  detail::require_same_length(beta_tilde, lambda, "shrink");
  detail::require_nonnegative(lambda, "shrink: lambda");
  detail::require_positive_variance(sigma2);
  Vec<Scalar> out(beta_tilde.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = detail::shrink_factor<Scalar>(lambda[i], sigma2) * beta_tilde[i];
  return out;
}

/// Stein's unbiased estimate of (1/p) E||beta_hat^lambda - beta||^2.
template <typename DerivedL, typename DerivedB>
typename DerivedB::Scalar sure(const Eigen::MatrixBase<DerivedL>& lambda,
                               const Eigen::MatrixBase<DerivedB>& beta_tilde,
                               typename DerivedB::Scalar sigma2) {
  using Scalar = typename DerivedB::Scalar;
  detail::require_same_length(lambda, beta_tilde, "sure");
  detail::require_nonnegative(lambda, "sure: lambda");
  detail::require_positive_variance(sigma2);
  Scalar total = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const Scalar r = detail::residual_factor<Scalar>(lambda[i], sigma2);
    // sigma2 (lambda - sigma2) / (sigma2 + lambda) == sigma2 (1 - 2 r)
    total += r * r * beta_tilde[i] * beta_tilde[i] + sigma2 * (Scalar(1) - Scalar(2) * r);
  }
  return total / Scalar(lambda.size());
}

template <typename DerivedL>
double sure(const Eigen::MatrixBase<DerivedL>& lambda, const SequenceData& data) {
  return sure(lambda, data.beta_tilde, data.sigma2);
}

/// Exact risk (1/p) E||beta_hat^lambda - beta||^2 of a fixed-lambda rule at beta.
template <typename DerivedL, typename DerivedB>
typename DerivedB::Scalar risk_given_beta(const Eigen::MatrixBase<DerivedL>& lambda,
                                          const Eigen::MatrixBase<DerivedB>& beta,
                                          typename DerivedB::Scalar sigma2) {
  using Scalar = typename DerivedB::Scalar;
  detail::require_same_length(lambda, beta, "risk_given_beta");
  detail::require_nonnegative(lambda, "risk_given_beta: lambda");
  detail::require_positive_variance(sigma2);
  Scalar total = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const Scalar r = detail::residual_factor<Scalar>(lambda[i], sigma2);
    const Scalar c = Scalar(1) - r;
    // sigma2 / (sigma2 + l)^2 * (sigma2 b^2 + l^2) == r^2 b^2 + c^2 sigma2
    total += r * r * beta[i] * beta[i] + c * c * sigma2;
  }
  return total / Scalar(lambda.size());
}

/// Bayes risk of the oracle rule: (1/p) sum sigma2 s_i / (sigma2 + s_i).
template <typename Derived>
typename Derived::Scalar oracle_risk(const Eigen::MatrixBase<Derived>& prior_variances,
                                     typename Derived::Scalar sigma2) {
  using Scalar = typename Derived::Scalar;
  detail::require_nonnegative(prior_variances, "oracle_risk: prior variances");
  detail::require_positive_variance(sigma2);
  if (prior_variances.size() == 0) throw InvalidArgument("oracle_risk: empty input");
  Scalar total = 0;
  for (Eigen::Index i = 0; i < prior_variances.size(); ++i)
    total += sigma2 * prior_variances[i] / (sigma2 + prior_variances[i]);
  return total / Scalar(prior_variances.size());
}

/// sigma_tilde_i^2 = beta_tilde_i^2 - sigma2 (may be negative).
Eigen::VectorXd elementwise_variances(const SequenceData& data);

/// sum_i log(sigma2 + v_i) + beta_tilde_i^2 / (sigma2 + v_i).
double marginal_objective(const Eigen::VectorXd& prior_variances, const SequenceData& data);

/// PAV on beta_tilde^2 - sigma2, then clamp at zero.
MonotoneFit fit_mmle(const SequenceData& data);

/// Bayes rule under known prior variances.
Eigen::VectorXd oracle_bayes(const SequenceData& data, const Eigen::VectorXd& prior_variances);

/// Joint estimate of sigma2 and the prior variances from the n coordinates of
/// y in an orthonormal completion of the design (first p are features).
VarianceFit estimate_variance(const Eigen::VectorXd& beta_tilde_full, Eigen::Index p);

/// Best fixed non-increasing lambda >= 0 for known prior variances, in Bayes risk.
/// The shrink factor c_i = lambda_i / (lambda_i + sigma2) enters the risk as
/// (s_i + sigma2)(c_i - c_i*)^2 + const, so this is a weighted PAV of the oracle factors.
BestMonotoneRule best_monotone_rule(const Eigen::VectorXd& prior_variances, double sigma2);

/// f_i(x) = log(x + sigma2) + beta_tilde_i^2 / (x + sigma2), minimized at beta_tilde_i^2 - sigma2.
ObjectiveFamily gaussian_variance_family(const SequenceData& data);

/// Per-coordinate SURE terms g_i(lambda), minimized at beta_tilde_i^2 - sigma2.
ObjectiveFamily sure_family(const SequenceData& data);

}  // namespace monoshrink

#endif  // MONOSHRINK_SHRINKAGE_HPP
