#include "monoshrink/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "monoshrink/rng.hpp"

namespace monoshrink {

namespace {

constexpr std::uint64_t kScenarioStream = 0x5CE7A410ULL;
constexpr std::uint64_t kDesignStream = 0xDE5167ULL;
constexpr std::uint64_t kMartingaleStream = 0x3A27ULL;

struct KindName {
  ScenarioKind kind;
  std::string_view name;
};
constexpr KindName kKinds[] = {{ScenarioKind::decay, "decay"},
                               {ScenarioKind::flat, "flat"},
                               {ScenarioKind::sparse, "sparse"},
                               {ScenarioKind::increasing, "increasing"}};

struct EstimatorEntry {
  Estimator estimator;
  std::string_view name;
};
constexpr EstimatorEntry kEstimators[] = {
    {Estimator::mmle, "mmle"},
    {Estimator::oracle, "oracle"},
    {Estimator::least_squares, "least_squares"},
    {Estimator::ridge_cv, "ridge_cv"},
    {Estimator::ridge_best_fixed, "ridge_best_fixed"},
    {Estimator::james_stein, "james_stein"},
    {Estimator::lasso_sure, "lasso_sure"},
    {Estimator::stepwise_aic, "stepwise_aic"},
    {Estimator::monotone_aic, "monotone_aic"},
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double std_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1)) / std::sqrt(double(v.size()));
}

/// Runs body(i) for i in [0, count) on `workers` threads. Rethrows the first failure.
void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  throw InvalidArgument("unknown scenario kind '" + std::string(name) + "'");
}

bool is_ordered(ScenarioKind kind) { return kind != ScenarioKind::increasing; }

Scenario make_scenario(ScenarioKind kind, Eigen::Index p, double sigma2, std::uint64_t seed,
                       const ScenarioOptions& options) {
  if (p < 1) throw InvalidArgument("make_scenario: p must be >= 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw InvalidArgument("make_scenario: sigma2 must be positive and finite");
  if (!(options.chi2_df > 0.0)) throw InvalidArgument("make_scenario: chi2_df must be positive");

  Engine rng(derive_seed(seed, kScenarioStream));
  std::chi_squared_distribution<double> chi2(options.chi2_df);
  auto draws = [&](Eigen::Index count, double scale) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (double& x : v) x = scale * chi2(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
  };

  Scenario s;
  s.kind = kind;
  s.p = p;
  s.sigma2 = sigma2;
  s.seed = seed;
  s.prior_variances.resize(p);
  switch (kind) {
    case ScenarioKind::decay: {
      const auto v = draws(p, 2.0);
      for (Eigen::Index i = 0; i < p; ++i) s.prior_variances[i] = v[static_cast<std::size_t>(i)];
      break;
    }
    case ScenarioKind::increasing: {
      auto v = draws(p, 2.0);
      std::reverse(v.begin(), v.end());
      for (Eigen::Index i = 0; i < p; ++i) s.prior_variances[i] = v[static_cast<std::size_t>(i)];
      break;
    }
    case ScenarioKind::flat:
      s.prior_variances.setConstant(2.0);
      break;
    case ScenarioKind::sparse: {
      const Eigen::Index zeros = (9 * p) / 10;
      const Eigen::Index signals = p - zeros;
      const auto v = draws(signals, 4.0);
      s.prior_variances.setZero();
      const Eigen::Index offset = options.sparse_signals_first ? 0 : zeros;
      for (Eigen::Index i = 0; i < signals; ++i)
        s.prior_variances[offset + i] = v[static_cast<std::size_t>(i)];
      break;
    }
  }
  return s;
}

std::string_view estimator_name(Estimator e) {
  for (const auto& entry : kEstimators)
    if (entry.estimator == e) return entry.name;
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  for (const auto& entry : kEstimators)
    if (entry.name == name) return entry.estimator;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

std::vector<Estimator> all_estimators() {
  std::vector<Estimator> out;
  for (const auto& entry : kEstimators) out.push_back(entry.estimator);
  return out;
}

double ReplicateResult::at(Estimator e) const {
  for (std::size_t k = 0; k < estimators.size(); ++k)
    if (estimators[k] == e) return mse[k];
  throw InvalidArgument("replicate result has no estimator '" + std::string(estimator_name(e)) +
                        "'");
}

ReplicateRunner::ReplicateRunner(Scenario scenario, std::vector<Estimator> estimators,
                                 SimulationConfig config)
    : scenario_(std::move(scenario)), estimators_(std::move(estimators)), config_(std::move(config)) {
  if (scenario_.p < 1 || scenario_.prior_variances.size() != scenario_.p)
    throw InvalidArgument("simulation: scenario prior variances do not match p");
  detail::require_nonnegative(scenario_.prior_variances, "simulation: prior variances");
  detail::require_positive_variance(scenario_.sigma2);

  fixed_grid_.push_back(0.0);
  fixed_grid_.insert(fixed_grid_.end(), config_.ridge_grid.begin(), config_.ridge_grid.end());

  if (std::find(estimators_.begin(), estimators_.end(), Estimator::ridge_cv) != estimators_.end()) {
    const Eigen::Index n = config_.design_rows > 0 ? config_.design_rows : 2 * scenario_.p;
    if (n <= scenario_.p) throw InvalidArgument("simulation: design_rows must exceed p");
    Engine rng(derive_seed(scenario_.seed, kDesignStream));
    design_ = validate_or_orthonormalize(random_orthonormal(n, scenario_.p, rng),
                                         OrthoMode::validate);
  }
}

ReplicateResult ReplicateRunner::run(std::uint64_t replicate_seed) const {
  const Eigen::Index p = scenario_.p;
  const double s2 = scenario_.sigma2;
  const double sigma = std::sqrt(s2);

  Engine rng(replicate_seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd beta(p);
  for (Eigen::Index i = 0; i < p; ++i)
    beta[i] = std::sqrt(scenario_.prior_variances[i]) * normal(rng);
  Eigen::VectorXd beta_tilde(p);
  for (Eigen::Index i = 0; i < p; ++i) beta_tilde[i] = beta[i] + sigma * normal(rng);

  const SequenceData data{beta_tilde, s2};
  auto mse = [&](const Eigen::VectorXd& est) { return (est - beta).squaredNorm() / double(p); };

  ReplicateResult out;
  out.estimators = estimators_;
  out.mse.reserve(estimators_.size());
  for (Estimator e : estimators_) {
    try {
      switch (e) {
        case Estimator::mmle:
          out.mse.push_back(mse(fit_mmle(data).beta_hat));
          break;
        case Estimator::oracle:
          out.mse.push_back(mse(oracle_bayes(data, scenario_.prior_variances)));
          break;
        case Estimator::least_squares:
          out.mse.push_back(mse(least_squares(data).beta_hat));
          break;
        case Estimator::ridge_cv: {
          // Response consistent with beta_tilde: Y = X beta_tilde + sigma (I - X X^T) w
          // has X^T Y = beta_tilde and Y ~ N(X beta, sigma2 I).
          const Eigen::MatrixXd& x = design_->x;
          Eigen::VectorXd w(x.rows());
          for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
          const Eigen::VectorXd y = x * beta_tilde + sigma * (w - x * (x.transpose() * w));
          RidgeCvOptions opts{config_.ridge_grid, config_.ridge_folds, derive_seed(replicate_seed, 1)};
          out.mse.push_back(mse(ridge_cv(*design_, y, opts).beta_hat));
          break;
        }
        case Estimator::ridge_best_fixed: {
          out.fixed_ridge_mse.resize(static_cast<Eigen::Index>(fixed_grid_.size()));
          for (std::size_t k = 0; k < fixed_grid_.size(); ++k)
            out.fixed_ridge_mse[static_cast<Eigen::Index>(k)] =
                mse(ridge_fixed(data, fixed_grid_[k]).beta_hat);
          // Placeholder until the best lambda is chosen across replicates.
          out.mse.push_back(out.fixed_ridge_mse.minCoeff());
          break;
        }
        case Estimator::james_stein:
          out.mse.push_back(mse(james_stein_positive(data).beta_hat));
          break;
        case Estimator::lasso_sure:
          out.mse.push_back(mse(lasso_sure(data).beta_hat));
          break;
        case Estimator::stepwise_aic:
          out.mse.push_back(mse(stepwise_aic(data).beta_hat));
          break;
        case Estimator::monotone_aic:
          out.mse.push_back(mse(monotone_aic(data).beta_hat));
          break;
      }
    } catch (const EstimatorError&) {
      throw;
    } catch (const std::exception& ex) {
      throw EstimatorError(e, ex.what());
    }
  }
  return out;
}

ReplicateResult run_replicate(const Scenario& scenario, const std::vector<Estimator>& estimators,
                              std::uint64_t seed, const SimulationConfig& config) {
  return ReplicateRunner(scenario, estimators, config).run(seed);
}

const EstimatorRisk* RiskReport::find(Estimator e) const {
  for (const auto& r : estimators)
    if (r.estimator == e) return &r;
  return nullptr;
}

RiskReport estimate_bayes_risk(const Scenario& scenario, int replicates,
                               const std::vector<Estimator>& estimators, std::uint64_t seed,
                               const SimulationConfig& config) {
  if (replicates < 2) throw InvalidArgument("estimate_bayes_risk: replicates must be >= 2");
  if (estimators.empty()) throw InvalidArgument("estimate_bayes_risk: no estimators");
  if (config.workers < 1) throw InvalidArgument("estimate_bayes_risk: workers must be >= 1");

  const ReplicateRunner runner(scenario, estimators, config);
  std::vector<ReplicateResult> results(static_cast<std::size_t>(replicates));
  parallel_for(replicates, config.workers, [&](int r) {
    results[static_cast<std::size_t>(r)] =
        runner.run(derive_seed(seed, static_cast<std::uint64_t>(r) + 1));
  });

  RiskReport report;
  report.scenario = scenario;
  report.replicates = replicates;
  report.seed = seed;
  report.oracle_risk = oracle_risk(scenario.prior_variances, scenario.sigma2);
  report.best_monotone_risk = best_monotone_rule(scenario.prior_variances, scenario.sigma2).risk;

  for (std::size_t k = 0; k < estimators.size(); ++k) {
    EstimatorRisk risk;
    risk.estimator = estimators[k];
    risk.mse.reserve(results.size());
    if (estimators[k] == Estimator::ridge_best_fixed) {
      const auto& grid = runner.fixed_ridge_grid();
      Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
      for (const auto& r : results) total += r.fixed_ridge_mse;
      Eigen::Index best = 0;
      total.minCoeff(&best);
      for (const auto& r : results) risk.mse.push_back(r.fixed_ridge_mse[best]);
      risk.tuning = grid[static_cast<std::size_t>(best)];
    } else {
      for (const auto& r : results) risk.mse.push_back(r.mse[k]);
    }
    risk.mean_mse = mean_of(risk.mse);
    risk.std_error = std_error_of(risk.mse);
    report.estimators.push_back(std::move(risk));
  }
  return report;
}

double oracle_gap_bound(Eigen::Index p, double sigma2, bool ordered) {
  if (p < 1) throw InvalidArgument("oracle_gap_bound: p must be >= 1");
  return (ordered ? 4.0 : 8.0) * std::sqrt(2.0 / double(p)) * sigma2;
}

OracleGapCheck check_oracle_gap(const RiskReport& report, double sigma2) {
  const EstimatorRisk* mmle = report.find(Estimator::mmle);
  if (!mmle) throw InvalidArgument("check_oracle_gap: report has no mmle estimator");

  const bool ordered = is_ordered(report.scenario.kind);
  OracleGapCheck check;
  check.mmle_risk = mmle->mean_mse;
  check.bound = oracle_gap_bound(report.scenario.p, sigma2, ordered);

  if (ordered) {
    check.reference = "oracle";
    check.reference_risk = report.oracle_risk;
    check.std_error = mmle->std_error;
  } else {
    const EstimatorRisk* best = nullptr;
    for (Estimator e : {Estimator::ridge_best_fixed, Estimator::james_stein,
                        Estimator::least_squares, Estimator::monotone_aic}) {
      const EstimatorRisk* r = report.find(e);
      if (r && (!best || r->mean_mse < best->mean_mse)) best = r;
    }
    if (best) {
      check.reference = std::string(estimator_name(best->estimator));
      check.reference_risk = best->mean_mse;
      // Same replicates on both sides: standard error of the paired difference.
      std::vector<double> diff(mmle->mse.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = mmle->mse[i] - best->mse[i];
      check.std_error = std_error_of(diff);
    } else {
      check.reference = "best_monotone_rule";
      check.reference_risk = report.best_monotone_risk;
      check.std_error = mmle->std_error;
    }
  }
  check.gap = check.mmle_risk - check.reference_risk;
  check.passed = check.gap <= check.bound + 3.0 * check.std_error;
  return check;
}

bool MartingaleCheck::within_bound() const {
  return mean_max_sq <= bound * (1.0 + 5.0 / std::sqrt(double(replicates)));
}

bool MartingaleCheck::above_endpoint() const {
  return mean_max_sq >= 2.0 * double(p) - 3.0 * std_error;
}

MartingaleCheck martingale_maximal_check(Eigen::Index p, int replicates, std::uint64_t seed) {
  if (p < 1) throw InvalidArgument("martingale_maximal_check: p must be >= 1");
  if (replicates < 100) throw InvalidArgument("martingale_maximal_check: replicates must be >= 100");

  Engine rng(derive_seed(seed, kMartingaleStream));
  std::normal_distribution<double> normal;
  std::vector<double> max_sq(static_cast<std::size_t>(replicates));
  double endpoint = 0.0;
  for (int r = 0; r < replicates; ++r) {
    double m = 0.0;
    double best = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double z = normal(rng);
      m += z * z - 1.0;
      best = std::max(best, m * m);
    }
    max_sq[static_cast<std::size_t>(r)] = best;
    endpoint += m * m;
  }

  MartingaleCheck check;
  check.p = p;
  check.replicates = replicates;
  check.mean_max_sq = mean_of(max_sq);
  check.std_error = std_error_of(max_sq);
  check.mean_endpoint_sq = endpoint / double(replicates);
  check.bound = 8.0 * double(p);
  return check;
}

}  // namespace monoshrink
