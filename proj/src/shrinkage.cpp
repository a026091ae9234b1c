#include "monoshrink/shrinkage.hpp"

#include <string>

namespace monoshrink {

void SequenceData::validate() const {
  if (beta_tilde.size() == 0) throw InvalidArgument("sequence data: p must be >= 1");
  detail::require_positive_variance(sigma2);
  if (!beta_tilde.allFinite()) throw InvalidArgument("sequence data: non-finite coefficient");
}

Eigen::VectorXd elementwise_variances(const SequenceData& data) {
  data.validate();
  return data.beta_tilde.array().square() - data.sigma2;
}

double marginal_objective(const Eigen::VectorXd& prior_variances, const SequenceData& data) {
  data.validate();
  detail::require_same_length(prior_variances, data.beta_tilde, "marginal_objective");
  detail::require_nonnegative(prior_variances, "marginal_objective: prior variances");
  double total = 0.0;
  for (Eigen::Index i = 0; i < prior_variances.size(); ++i) {
    const double v = data.sigma2 + prior_variances[i];
    total += std::log(v) + data.beta_tilde[i] * data.beta_tilde[i] / v;
  }
  return total;
}

MonotoneFit fit_mmle(const SequenceData& data) {
  MonotoneFit fit;
  fit.blocks = pav_decreasing(elementwise_variances(data));
  // Clamp after pooling, never before.
  fit.prior_variances = fit.blocks.fitted.cwiseMax(0.0);
  fit.shrink_factors = fit.prior_variances.array() / (fit.prior_variances.array() + data.sigma2);
  fit.beta_hat = fit.shrink_factors.cwiseProduct(data.beta_tilde);
  fit.sure_value = sure(fit.prior_variances, data);
  fit.objective_value = marginal_objective(fit.prior_variances, data);
  return fit;
}

Eigen::VectorXd oracle_bayes(const SequenceData& data, const Eigen::VectorXd& prior_variances) {
  data.validate();
  return shrink(data.beta_tilde, prior_variances, data.sigma2);
}

VarianceFit estimate_variance(const Eigen::VectorXd& beta_tilde_full, Eigen::Index p) {
  const Eigen::Index n = beta_tilde_full.size();
  if (p < 1 || p >= n)
    throw InvalidArgument("estimate_variance: need 1 <= p < n (p=" + std::to_string(p) +
                          ", n=" + std::to_string(n) + ")");
  if (!beta_tilde_full.allFinite())
    throw InvalidArgument("estimate_variance: non-finite coordinate");

  // The n - p residual coordinates share one variance, so they enter PAV as
  // a single unit carrying weight n - p.
  WeightedSequence<double> units;
  units.values.resize(p + 1);
  units.weights.setOnes(p + 1);
  units.values.head(p) = beta_tilde_full.head(p).array().square();
  units.values[p] = beta_tilde_full.tail(n - p).squaredNorm() / double(n - p);
  units.weights[p] = double(n - p);

  const auto blocks = pav_decreasing(units);

  VarianceFit fit;
  fit.sigma2_hat = blocks.fitted[p];
  fit.tau2.resize(n);
  fit.tau2.head(p) = blocks.fitted.head(p);
  fit.tau2.tail(n - p).setConstant(fit.sigma2_hat);
  if (!(fit.sigma2_hat > 0.0))
    throw DegenerateVarianceError("estimate_variance: estimated noise variance is zero");
  fit.prior_variances = fit.tau2.head(p).array() - fit.sigma2_hat;
  return fit;
}

BestMonotoneRule best_monotone_rule(const Eigen::VectorXd& prior_variances, double sigma2) {
  const double base = oracle_risk(prior_variances, sigma2);
  const Eigen::Index p = prior_variances.size();

  WeightedSequence<double> seq;
  seq.weights = prior_variances.array() + sigma2;
  seq.values = prior_variances.array() / seq.weights.array();
  const auto blocks = pav_decreasing(seq);

  BestMonotoneRule rule;
  rule.shrink_factors = blocks.fitted;
  rule.lambda = sigma2 * rule.shrink_factors.array() / (1.0 - rule.shrink_factors.array());
  const Eigen::VectorXd diff = rule.shrink_factors - seq.values;
  rule.risk = base + diff.cwiseAbs2().cwiseProduct(seq.weights).sum() / double(p);
  return rule;
}

ObjectiveFamily gaussian_variance_family(const SequenceData& data) {
  data.validate();
  const Eigen::VectorXd b2 = data.beta_tilde.array().square();
  const double s2 = data.sigma2;
  return {[b2, s2](Eigen::Index i, double x) {
            const double v = x + s2;
            if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
            return std::log(v) + b2[i] / v;
          },
          elementwise_variances(data)};
}

ObjectiveFamily sure_family(const SequenceData& data) {
  data.validate();
  const Eigen::VectorXd b2 = data.beta_tilde.array().square();
  const double s2 = data.sigma2;
  return {[b2, s2](Eigen::Index i, double lambda) {
            const double v = lambda + s2;
            if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
            const double r = s2 / v;
            return r * r * b2[i] + s2 * (lambda - s2) / v;
          },
          elementwise_variances(data)};
}

}  // namespace monoshrink
