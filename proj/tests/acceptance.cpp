// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "monoshrink/baselines.hpp"
#include "monoshrink/cli.hpp"
#include "monoshrink/pav.hpp"
#include "monoshrink/regression.hpp"
#include "monoshrink/rng.hpp"
#include "monoshrink/shrinkage.hpp"
#include "monoshrink/simulation.hpp"
#include "oracles.hpp"

using namespace monoshrink;

namespace {

// Tolerances and sizes, fixed here.
constexpr double kPavTol = 1e-10;
constexpr double kPavSeconds = 10.0;
constexpr int kInstances = 1000;
constexpr int kRandomFeasiblePoints = 100;
constexpr double kObjectiveTol = 1e-8;
constexpr double kBetaTol = 1e-8;
constexpr double kClosedFormRelTol = 1e-12;
constexpr int kSureTriples = 20;
constexpr int kSureP = 50;
constexpr int kSureDraws = 100'000;
constexpr double kSlackSe = 3.0;
constexpr int kReps = 400;
constexpr double kVarianceRelErr = 0.10;
constexpr int kVarianceDatasets = 100;
constexpr int kMartingaleReps = 10'000;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << name << " | " << detail
            << std::endl;
  if (!pass) ++failures;
}

void info(const std::string& text) { std::cout << "      info: " << text << std::endl; }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// SE of the mean of a paired per-replicate difference a - b.
std::pair<double, double> paired(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = double(a.size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double d = a[r] - b[r];
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
  return {mean, std::sqrt(var / n)};
}

SequenceData random_instance(Engine& rng, int p) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  SequenceData data;
  data.sigma2 = 0.25 + 3.75 * unif(rng);
  data.beta_tilde.resize(p);
  for (int i = 0; i < p; ++i) {
    const double prior = 4.0 * data.sigma2 * unif(rng) * unif(rng);
    data.beta_tilde[i] = std::sqrt(prior + data.sigma2) * normal(rng);
  }
  return data;
}

Eigen::VectorXd random_monotone_point(Engine& rng, int p, double scale) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd v(p);
  for (int i = 0; i < p; ++i) v[i] = unif(rng) < 0.2 ? 0.0 : scale * expo(rng);
  std::sort(v.data(), v.data() + p, std::greater<>());
  return v;
}

void criterion_pav() {
  Engine rng(1001);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < kInstances; ++trial) {
    const int m = 1 + trial % 8;
    Eigen::VectorXd v(m), w(m);
    for (int i = 0; i < m; ++i) {
      v[i] = normal(rng);
      w[i] = trial % 2 ? unif(rng) : 1.0;
    }
    const auto fitted = pav_decreasing(WeightedSequence<double>{v, w}).fitted;
    worst = std::max(worst, max_abs(fitted - oracle::antitonic_regression(v, w)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "PAV matches exhaustive partition search", worst <= kPavTol && secs < kPavSeconds,
         "max diff " + num(worst) + " (tol " + num(kPavTol) + "), " + num(secs) + " s (limit " +
             num(kPavSeconds) + " s)");
}

void criteria_mmle() {
  Engine rng(2002);
  double worst_obj = -INFINITY;     // fit objective minus best competitor (<= tol to pass)
  double worst_stored = 0.0;        // |objective_value - independent evaluation|
  double worst_beta = 0.0;
  double worst_sure = -INFINITY;
  double worst_closed = 0.0;
  for (int trial = 0; trial < kInstances; ++trial) {
    const int p = 1 + trial % 8;
    const SequenceData data = random_instance(rng, p);
    const auto fit = fit_mmle(data);
    const auto& b = data.beta_tilde;
    const double s2 = data.sigma2;

    const double fit_obj = oracle::marginal_objective(fit.prior_variances, b, s2);
    worst_stored = std::max(worst_stored, std::abs(fit.objective_value - fit_obj) /
                                              std::max(1.0, std::abs(fit_obj)));
    const double fit_sure = oracle::sure_objective(fit.prior_variances, b, s2);

    const auto candidates = oracle::clamped_block_candidates(b, s2);
    for (const auto& c : candidates) {
      worst_obj = std::max(worst_obj, fit_obj - oracle::marginal_objective(c, b, s2));
      worst_sure = std::max(worst_sure, fit_sure - oracle::sure_objective(c, b, s2));
    }
    for (int k = 0; k < kRandomFeasiblePoints; ++k) {
      const Eigen::VectorXd point = random_monotone_point(rng, p, 2.0 * s2);
      worst_obj = std::max(worst_obj, fit_obj - oracle::marginal_objective(point, b, s2));
      worst_sure = std::max(worst_sure, fit_sure - oracle::sure_objective(point, b, s2));
    }

    // SURE-minimizing monotone lambda by enumeration, mapped to beta_hat.
    const auto lam = oracle::argmin_over(candidates, [&](const Eigen::VectorXd& l) {
      return oracle::sure_objective(l, b, s2);
    });
    const Eigen::VectorXd beta_sure = (lam.array() / (lam.array() + s2) * b.array()).matrix();
    worst_beta = std::max(worst_beta, max_abs(beta_sure - fit.beta_hat));

    for (const auto& blk : fit.blocks.blocks) {
      const auto seg = b.segment(blk.start, blk.size());
      const double n_i = double(blk.size());
      const double prior = std::max(0.0, (seg.array().square() - s2).sum() / n_i);
      const double factor = std::max(0.0, 1.0 - n_i * s2 / seg.squaredNorm());
      for (Eigen::Index i = blk.start; i <= blk.end; ++i) {
        worst_closed = std::max(worst_closed, std::abs(fit.prior_variances[i] - prior) /
                                                  std::max(std::abs(prior), s2));
        worst_closed = std::max(worst_closed, std::abs(fit.shrink_factors[i] - factor) /
                                                  std::max(std::abs(factor), 1.0));
      }
    }
  }
  report(2, "MMLE attains the minimum of the marginal objective",
         worst_obj <= kObjectiveTol && worst_stored <= kObjectiveTol,
         "max(fit - competitor) " + num(worst_obj) + ", stored-objective mismatch " +
             num(worst_stored) + " (tol " + num(kObjectiveTol) + ")");
  report(3, "MMLE equals the SURE-minimizing monotone estimator", worst_beta <= kBetaTol,
         "max |beta diff| " + num(worst_beta) + " (tol " + num(kBetaTol) +
             "); fit SURE minus best competitor " + num(worst_sure));
  report(4, "blockwise James-Stein closed form", worst_closed <= kClosedFormRelTol,
         "max relative diff " + num(worst_closed) + " (tol " + num(kClosedFormRelTol) + ")");
}

void criterion_sure_unbiased() {
  Engine rng(5005);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int within = 0;
  double worst_z = 0.0;
  Eigen::VectorXd bt(kSureP);
  for (int t = 0; t < kSureTriples; ++t) {
    const double s2 = 0.25 + 2.0 * unif(rng);
    Eigen::VectorXd lambda(kSureP), beta(kSureP);
    for (int i = 0; i < kSureP; ++i) {
      lambda[i] = 4.0 * unif(rng);
      beta[i] = 2.0 * normal(rng);
    }
    const double sd = std::sqrt(s2);
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < kSureDraws; ++k) {
      for (int i = 0; i < kSureP; ++i) bt[i] = beta[i] + sd * normal(rng);
      const double v = sure(lambda, bt, s2);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / kSureDraws;
    const double se = std::sqrt((sum_sq - kSureDraws * mean * mean) / (kSureDraws - 1) / kSureDraws);
    const double z = std::abs(mean - risk_given_beta(lambda, beta, s2)) / se;
    worst_z = std::max(worst_z, z);
    if (z <= kSlackSe) ++within;
  }
  report(5, "SURE is unbiased for the risk", within == kSureTriples,
         std::to_string(within) + "/" + std::to_string(kSureTriples) + " triples within " +
             num(kSlackSe) + " SE, max |z| " + num(worst_z));
}

void criterion_theorem_bound() {
  const std::vector<Estimator> est{Estimator::mmle, Estimator::oracle};
  const auto s100 = make_scenario(ScenarioKind::decay, 100, 1.0, 6006);
  const auto r100 = estimate_bayes_risk(s100, kReps, est, 6007);
  const auto g100 = check_oracle_gap(r100, 1.0);
  const auto s400 = make_scenario(ScenarioKind::decay, 400, 1.0, 6008);
  const auto r400 = estimate_bayes_risk(s400, kReps, est, 6009);
  const auto g400 = check_oracle_gap(r400, 1.0);
  const bool pass = g100.passed && g400.passed && g400.gap < g400.bound;
  report(6, "oracle-gap bound, decay scenario", pass,
         "p=100 gap " + num(g100.gap) + " <= " + num(g100.bound) + " + 3*" + num(g100.std_error) +
             "; p=400 gap " + num(g400.gap) + " < " + num(g400.bound) + " (se " +
             num(g400.std_error) + ")");
}

void criterion_figure_ordering() {
  const int p = 100;
  const double bound_ordered = oracle_gap_bound(p, 1.0, true);
  const double bound_free = oracle_gap_bound(p, 1.0, false);
  bool pass = true;
  std::ostringstream detail;

  auto mse = [](const RiskReport& r, Estimator e) -> const EstimatorRisk& {
    const EstimatorRisk* x = r.find(e);
    if (!x) throw std::runtime_error("missing estimator in report");
    return *x;
  };

  {
    const auto r = estimate_bayes_risk(make_scenario(ScenarioKind::decay, p, 1.0, 7001), kReps,
                                       all_estimators(), 7002);
    const auto& m = mse(r, Estimator::mmle);
    bool ok = true;
    detail << "decay mmle " << num(m.mean_mse);
    for (Estimator e : {Estimator::ridge_cv, Estimator::james_stein, Estimator::stepwise_aic,
                        Estimator::least_squares}) {
      const auto [d, se] = paired(m.mse, mse(r, e).mse);
      ok = ok && d <= kSlackSe * se;
      detail << " " << estimator_name(e) << " " << num(mse(r, e).mean_mse);
    }
    detail << (ok ? " ok" : " VIOLATED") << "; ";
    pass = pass && ok;
  }
  {
    const auto r = estimate_bayes_risk(make_scenario(ScenarioKind::flat, p, 1.0, 7003), kReps,
                                       all_estimators(), 7004);
    const double d = mse(r, Estimator::mmle).mean_mse - mse(r, Estimator::james_stein).mean_mse;
    const bool ok = d <= bound_ordered;
    detail << "flat mmle-js " << num(d) << " <= " << num(bound_ordered) << (ok ? " ok" : " VIOLATED")
           << "; ";
    pass = pass && ok;
  }
  {
    const auto sparse = make_scenario(ScenarioKind::sparse, p, 1.0, 7005, {1.0, true});
    const auto r = estimate_bayes_risk(sparse, kReps, all_estimators(), 7006);
    const auto [d, se] = paired(mse(r, Estimator::mmle).mse, mse(r, Estimator::lasso_sure).mse);
    const bool ok = d <= kSlackSe * se;
    detail << "sparse mmle " << num(mse(r, Estimator::mmle).mean_mse) << " lasso "
           << num(mse(r, Estimator::lasso_sure).mean_mse) << (ok ? " ok" : " VIOLATED") << "; ";
    pass = pass && ok;

    const auto literal = make_scenario(ScenarioKind::sparse, p, 1.0, 7005);
    const auto rl = estimate_bayes_risk(literal, kReps, {Estimator::mmle, Estimator::lasso_sure}, 7006);
    const auto [dl, sel] = paired(mse(rl, Estimator::mmle).mse, mse(rl, Estimator::lasso_sure).mse);
    info("sparse with zeros first (not gated): mmle " + num(mse(rl, Estimator::mmle).mean_mse) +
         ", lasso_sure " + num(mse(rl, Estimator::lasso_sure).mean_mse) + ", diff " + num(dl) +
         " (se " + num(sel) + ")");
  }
  {
    const auto r = estimate_bayes_risk(make_scenario(ScenarioKind::increasing, p, 1.0, 7007), kReps,
                                       all_estimators(), 7008);
    const auto& m = mse(r, Estimator::mmle);
    const auto [d, se] = paired(m.mse, mse(r, Estimator::monotone_aic).mse);
    const double gap = m.mean_mse - r.best_monotone_risk;
    const bool ok = d <= kSlackSe * se && gap <= bound_free + kSlackSe * m.std_error;
    detail << "increasing mmle " << num(m.mean_mse) << " monotone_aic "
           << num(mse(r, Estimator::monotone_aic).mean_mse) << ", gap to best monotone rule "
           << num(gap) << " <= " << num(bound_free) << (ok ? " ok" : " VIOLATED");
    pass = pass && ok;
  }
  report(7, "estimator ordering across the four scenarios", pass, detail.str());
}

void criterion_variance() {
  const int n = 1000, p = 100;
  const auto scenario = make_scenario(ScenarioKind::decay, p, 1.0, 8001);
  Engine rng(8002);
  std::normal_distribution<double> normal;
  const Design design{random_orthonormal(n, p, rng)};
  double total = 0.0;
  Eigen::VectorXd beta(p), y(n);
  for (int r = 0; r < kVarianceDatasets; ++r) {
    for (int i = 0; i < p; ++i) beta[i] = std::sqrt(scenario.prior_variances[i]) * normal(rng);
    for (int i = 0; i < n; ++i) y[i] = normal(rng);
    y += design.x * beta;
    total += std::abs(estimate_variance(embed(design, y).full_coordinates(), p).sigma2_hat - 1.0);
  }
  const double mean_rel = total / kVarianceDatasets;

  Eigen::VectorXd a(4), b(4);
  a << 3, 2, 1, -1;
  b << std::sqrt(0.5), std::sqrt(0.2), 1, 1;
  const auto fa = estimate_variance(a, 2);
  const auto fb = estimate_variance(b, 2);
  const bool hand_a = fa.sigma2_hat == 1.0 && fa.prior_variances == Eigen::Vector2d(8, 3);
  const bool hand_b = std::abs(fb.sigma2_hat - 0.675) <= 1e-15 && max_abs(fb.prior_variances) == 0.0;
  report(8, "noise variance estimate", mean_rel < kVarianceRelErr && hand_a && hand_b,
         "mean relative error " + num(mean_rel) + " (< " + num(kVarianceRelErr) +
             "); hand examples " + (hand_a ? "exact" : "MISMATCH") + ", sigma2_hat " +
             num(fb.sigma2_hat) + (hand_b ? " ok" : " MISMATCH"));
}

void criterion_martingale() {
  bool pass = true;
  std::vector<std::string> parts;
  std::uint64_t seed = 9001;
  for (Eigen::Index p : {1, 10, 100}) {
    const auto c = martingale_maximal_check(p, kMartingaleReps, seed++);
    pass = pass && c.within_bound() && c.above_endpoint();
    parts.push_back("p=" + std::to_string(p) + " E[max M^2] " + num(c.mean_max_sq) + " (se " +
              num(c.std_error) + ", 8p=" + num(c.bound) + ", 2p=" + num(2.0 * double(p)) + ")");
  }
  report(9, "maximal inequality for the partial-sum martingale", pass,
         parts[0] + "; " + parts[1] + "; " + parts[2]);
}

void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("monoshrink_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string one = (dir / "w1.json").string(), eight = (dir / "w8.json").string();
  std::ostringstream out, err;
  const std::vector<std::string> base{"simulate", "--scenario", "decay", "--p", "100", "--reps",
                                      "400", "--seed", "7"};
  auto with = [&](const std::string& workers, const std::string& path) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers, "--out", path});
    return cli::dispatch(args, out, err);
  };
  const int c1 = with("1", one);
  const int c8 = with("8", eight);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string a = slurp(one), b = slurp(eight);
  fs::remove_all(dir);
  report(10, "simulate output independent of worker count", c1 == 0 && c8 == 0 && !a.empty() && a == b,
         "exit codes " + std::to_string(c1) + "/" + std::to_string(c8) + ", " +
             std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> steps{criterion_pav,           criteria_mmle,
                                                  criterion_sure_unbiased, criterion_theorem_bound,
                                                  criterion_figure_ordering, criterion_variance,
                                                  criterion_martingale,    criterion_determinism};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::cout << "FAIL  unexpected exception: " << e.what() << std::endl;
      ++failures;
    }
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " failing" : std::string("acceptance: all criteria pass"))
            << std::endl;
  return failures ? 1 : 0;
}
