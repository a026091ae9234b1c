#ifndef MONOSHRINK_SIMULATION_HPP
#define MONOSHRINK_SIMULATION_HPP

// Monte Carlo Bayes-risk study in the sequence model: fixed prior variances,
// beta_i ~ N(0, sigma_i^2), beta_tilde_i ~ N(beta_i, sigma2), squared error
// averaged over coordinates and replicates.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "monoshrink/baselines.hpp"
#include "monoshrink/shrinkage.hpp"

namespace monoshrink {

enum class ScenarioKind { decay, flat, sparse, increasing };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view name);

/// Ordered kinds satisfy (or, for sparse, are treated under) the monotone prior assumption.
bool is_ordered(ScenarioKind kind);

struct ScenarioOptions {
  /// Degrees of freedom of the chi-square draws behind the "2 chi^2" / "4 chi^2" profiles.
  double chi2_df = 1.0;
  /// Sparse profile: put the non-zero variances first instead of after the zeros.
  bool sparse_signals_first = false;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::decay;
  Eigen::Index p = 0;
  double sigma2 = 1.0;
  Eigen::VectorXd prior_variances;
  std::uint64_t seed = 0;
};

/// decay: 2 chi^2 draws sorted decreasing; flat: all 2; sparse: floor(0.9 p)
/// zeros then 4 chi^2 draws sorted decreasing; increasing: decay sorted increasing.
Scenario make_scenario(ScenarioKind kind, Eigen::Index p, double sigma2, std::uint64_t seed,
                       const ScenarioOptions& options = {});

enum class Estimator {
  mmle,
  oracle,
  least_squares,
  ridge_cv,
  ridge_best_fixed,
  james_stein,
  lasso_sure,
  stepwise_aic,
  monotone_aic,
};

std::string_view estimator_name(Estimator e);
Estimator parse_estimator(std::string_view name);
std::vector<Estimator> all_estimators();

/// Raised when an estimator fails inside a replicate.
class EstimatorError : public std::runtime_error {
 public:
  EstimatorError(Estimator e, const std::string& what)
      : std::runtime_error(std::string(estimator_name(e)) + ": " + what), estimator_(e) {}
  Estimator estimator() const noexcept { return estimator_; }

 private:
  Estimator estimator_;
};

struct SimulationConfig {
  int workers = 1;
  /// Rows of the fixed orthonormal design used by ridge_cv; 0 means 2p.
  Eigen::Index design_rows = 0;
  int ridge_folds = 10;
  std::vector<double> ridge_grid = default_ridge_grid();
};

struct ReplicateResult {
  std::vector<Estimator> estimators;
  std::vector<double> mse;
  /// Per-lambda MSE of beta_tilde / (1 + lambda) over {0} U ridge_grid, when
  /// ridge_best_fixed is requested.
  Eigen::VectorXd fixed_ridge_mse;

  double at(Estimator e) const;
};

/// Holds the per-report state shared by every replicate (the fixed design for ridge_cv).
class ReplicateRunner {
 public:
  ReplicateRunner(Scenario scenario, std::vector<Estimator> estimators,
                  SimulationConfig config = {});

  ReplicateResult run(std::uint64_t replicate_seed) const;

  const Scenario& scenario() const { return scenario_; }
  const std::vector<Estimator>& estimators() const { return estimators_; }
  const SimulationConfig& config() const { return config_; }
  /// {0} U ridge_grid.
  const std::vector<double>& fixed_ridge_grid() const { return fixed_grid_; }

 private:
  Scenario scenario_;
  std::vector<Estimator> estimators_;
  SimulationConfig config_;
  std::vector<double> fixed_grid_;
  std::optional<Design> design_;
};

ReplicateResult run_replicate(const Scenario& scenario, const std::vector<Estimator>& estimators,
                              std::uint64_t seed, const SimulationConfig& config = {});

struct EstimatorRisk {
  Estimator estimator = Estimator::mmle;
  double mean_mse = 0.0;
  double std_error = 0.0;
  std::vector<double> mse;
  /// Selected lambda for ridge_best_fixed.
  std::optional<double> tuning;
};

struct RiskReport {
  Scenario scenario;
  int replicates = 0;
  std::uint64_t seed = 0;
  double oracle_risk = 0.0;
  /// Bayes risk of the best fixed monotone shrinkage rule (closed form).
  double best_monotone_risk = 0.0;
  std::vector<EstimatorRisk> estimators;

  const EstimatorRisk* find(Estimator e) const;
};

/// Replicate r uses seed derive_seed(seed, r + 1); output does not depend on config.workers.
RiskReport estimate_bayes_risk(const Scenario& scenario, int replicates,
                               const std::vector<Estimator>& estimators, std::uint64_t seed,
                               const SimulationConfig& config = {});

/// 4 sqrt(2/p) sigma2 for ordered variances, 8 sqrt(2/p) sigma2 otherwise.
double oracle_gap_bound(Eigen::Index p, double sigma2, bool ordered);

struct OracleGapCheck {
  std::string reference;
  double reference_risk = 0.0;
  double mmle_risk = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool passed = false;
};

/// Ordered scenarios compare MMLE with the oracle risk; the increasing scenario
/// compares it with the best reported member of the monotone shrinkage family
/// (ridge_best_fixed, james_stein, least_squares, monotone_aic). Passes when
/// gap <= bound + 3 SE.
OracleGapCheck check_oracle_gap(const RiskReport& report, double sigma2);

struct MartingaleCheck {
  Eigen::Index p = 0;
  int replicates = 0;
  /// Monte Carlo E[max_j M_j^2], M_j = sum_{i<=j} (Z_i - 1), Z_i ~ chi^2_1.
  double mean_max_sq = 0.0;
  double std_error = 0.0;
  /// Monte Carlo E[M_p^2] (exactly 2p in expectation).
  double mean_endpoint_sq = 0.0;
  double bound = 0.0;

  bool within_bound() const;
  bool above_endpoint() const;
};

MartingaleCheck martingale_maximal_check(Eigen::Index p, int replicates, std::uint64_t seed);

}  // namespace monoshrink

#endif  // MONOSHRINK_SIMULATION_HPP
