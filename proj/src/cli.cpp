#include "monoshrink/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <sstream>

#include "monoshrink/baselines.hpp"
#include "monoshrink/error.hpp"
#include "monoshrink/io.hpp"
#include "monoshrink/regression.hpp"
#include "monoshrink/shrinkage.hpp"
#include "monoshrink/simulation.hpp"

#ifndef MONOSHRINK_VERSION
#define MONOSHRINK_VERSION "0.0.0"
#endif

namespace monoshrink::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitArgs {
  std::string input;
  std::optional<double> sigma2;
  bool estimate_variance = false;
  std::string design;
  std::string response;
  bool orthonormalize = false;
  std::string out = "fit.json";
};

struct VarianceArgs {
  std::string design;
  std::string response;
  bool orthonormalize = false;
  std::string out = "var.json";
};

struct CompareArgs {
  std::string input;
  double sigma2 = 0.0;
  std::string out = "table.csv";
  double ridge_lambda = 1.0;
  std::string design;
  std::string response;
  int folds = 10;
  std::uint64_t seed = 0;
};

struct SimulateArgs {
  std::string scenario;
  Eigen::Index p = 100;
  double sigma2 = 1.0;
  int reps = 400;
  std::optional<std::uint64_t> seed;
  std::string out = "report.json";
  std::string csv;
  int workers = 1;
  double df = 1.0;
  bool sparse_signals_first = false;
  std::vector<std::string> estimators;
  Eigen::Index design_rows = 0;
};

struct BlocksArgs {
  std::string input;
  double sigma2 = 0.0;
};

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

Design load_design(const std::string& path, bool orthonormalize) {
  return validate_or_orthonormalize(read_csv_file(path).values,
                                    orthonormalize ? OrthoMode::gram_schmidt : OrthoMode::validate);
}

int run_fit(const FitArgs& a, std::ostream& out) {
  const bool have_design = !a.design.empty() || !a.response.empty();
  if (have_design && (a.design.empty() || a.response.empty()))
    throw UsageError("--design and --response must be given together");
  if (a.input.empty() == !have_design)
    throw UsageError("give exactly one of --input or --design/--response");
  if (a.estimate_variance == a.sigma2.has_value())
    throw UsageError("give exactly one of --sigma2 or --estimate-variance");
  if (a.estimate_variance && !have_design)
    throw UsageError("--estimate-variance requires --design and --response");

  SequenceData data;
  std::string source = "given";
  if (have_design) {
    const Design design = load_design(a.design, a.orthonormalize);
    const SequenceEmbedding emb = embed(design, read_vector_file(a.response));
    data.beta_tilde = emb.beta_tilde;
    if (a.estimate_variance) {
      data.sigma2 = estimate_variance(emb.full_coordinates(), design.cols()).sigma2_hat;
      source = "estimated";
    } else {
      data.sigma2 = *a.sigma2;
    }
  } else {
    data.beta_tilde = read_coefficients_file(a.input);
    data.sigma2 = *a.sigma2;
  }

  const MonotoneFit fit = fit_mmle(data);
  const auto report = FitReportFile::from_fit(fit, data, source);
  write_text_file(a.out, report.to_json().dump(2) + "\n");
  out << "p=" << data.size() << " sigma2=" << format_double(data.sigma2) << " (" << source
      << ") blocks=" << fit.blocks.blocks.size() << " sure=" << format_double(fit.sure_value)
      << " -> " << a.out << "\n";
  return kExitOk;
}

int run_estimate_variance(const VarianceArgs& a, std::ostream& out) {
  const Design design = load_design(a.design, a.orthonormalize);
  const SequenceEmbedding emb = embed(design, read_vector_file(a.response));
  const VarianceFit fit = estimate_variance(emb.full_coordinates(), design.cols());

  Json j;
  j["n"] = design.rows();
  j["p"] = design.cols();
  j["sigma2_hat"] = fit.sigma2_hat;
  Json prior = Json::array();
  for (Eigen::Index i = 0; i < fit.prior_variances.size(); ++i) prior.push_back(fit.prior_variances[i]);
  j["prior_variances"] = std::move(prior);
  Json tau = Json::array();
  for (Eigen::Index i = 0; i < fit.tau2.size(); ++i) tau.push_back(fit.tau2[i]);
  j["tau2"] = std::move(tau);
  write_text_file(a.out, j.dump(2) + "\n");
  out << "sigma2_hat=" << format_double(fit.sigma2_hat) << " -> " << a.out << "\n";
  return kExitOk;
}

int run_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  const bool have_design = !a.design.empty() || !a.response.empty();
  if (have_design && (a.design.empty() || a.response.empty()))
    throw UsageError("--design and --response must be given together");

  const SequenceData data{read_coefficients_file(a.input), a.sigma2};
  data.validate();

  std::vector<BaselineEstimate> rows;
  const MonotoneFit fit = fit_mmle(data);
  rows.push_back({"mmle", fit.beta_hat, std::nullopt, std::nullopt});
  err << "mmle: blocks=" << fit.blocks.blocks.size() << " sure=" << format_double(fit.sure_value)
      << "\n";

  auto add = [&](BaselineEstimate est, const char* tuning_label) {
    err << est.name << ": ";
    if (est.tuning)
      err << tuning_label << "=" << format_double(*est.tuning);
    else
      err << "no tuning";
    err << "\n";
    rows.push_back(std::move(est));
  };
  add(least_squares(data), "");
  add(ridge_fixed(data, a.ridge_lambda), "lambda");
  if (have_design) {
    const Design design = load_design(a.design, false);
    const Eigen::VectorXd y = read_vector_file(a.response);
    if (design.cols() != data.size())
      throw DataError("design has " + std::to_string(design.cols()) + " columns but input has " +
                      std::to_string(data.size()) + " coefficients");
    add(ridge_cv(design, y, {default_ridge_grid(), a.folds, a.seed}), "lambda");
  }
  if (data.size() >= 3)
    add(james_stein_positive(data), "factor");
  else
    err << "james_stein: skipped (requires p >= 3)\n";
  add(lasso_sure(data), "threshold");
  add(stepwise_aic(data), "k");
  add(monotone_aic(data), "k");

  std::ostringstream csv;
  csv << "estimator,index,beta_hat\n";
  for (const auto& r : rows)
    for (Eigen::Index i = 0; i < r.beta_hat.size(); ++i)
      csv << r.name << ',' << (i + 1) << ',' << format_double(r.beta_hat[i]) << '\n';
  write_text_file(a.out, csv.str());
  out << rows.size() << " estimators -> " << a.out << "\n";
  return kExitOk;
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (!a.seed) throw UsageError("--seed is required for simulate");
  const ScenarioKind kind = parse_scenario_kind(a.scenario);

  std::vector<Estimator> estimators;
  if (a.estimators.empty()) {
    estimators = all_estimators();
  } else {
    for (const auto& name : a.estimators) estimators.push_back(parse_estimator(name));
  }

  ScenarioOptions scenario_opts;
  scenario_opts.chi2_df = a.df;
  scenario_opts.sparse_signals_first = a.sparse_signals_first;
  const Scenario scenario = make_scenario(kind, a.p, a.sigma2, *a.seed, scenario_opts);

  SimulationConfig config;
  config.workers = a.workers;
  config.design_rows = a.design_rows;
  const RiskReport report = estimate_bayes_risk(scenario, a.reps, estimators, *a.seed, config);

  Json j = to_json(report);
  std::optional<OracleGapCheck> gap;
  if (report.find(Estimator::mmle)) {
    gap = check_oracle_gap(report, a.sigma2);
    j["gap_check"] = to_json(*gap);
  }
  write_text_file(a.out, j.dump(2) + "\n");
  if (!a.csv.empty()) {
    std::ostringstream csv;
    write_mse_csv(csv, report);
    write_text_file(a.csv, csv.str());
  }

  out << "scenario=" << to_string(kind) << " p=" << a.p << " sigma2=" << format_double(a.sigma2)
      << " reps=" << a.reps << " seed=" << *a.seed << "\n";
  out << "oracle_risk=" << format_double(report.oracle_risk)
      << " best_monotone_risk=" << format_double(report.best_monotone_risk) << "\n";
  for (const auto& r : report.estimators) {
    out << "  " << estimator_name(r.estimator) << ": mean_mse=" << format_double(r.mean_mse)
        << " se=" << format_double(r.std_error);
    if (r.tuning) out << " lambda=" << format_double(*r.tuning);
    out << "\n";
  }
  if (gap) {
    out << "gap(mmle - " << gap->reference << ")=" << format_double(gap->gap)
        << " bound=" << format_double(gap->bound) << " se=" << format_double(gap->std_error)
        << " " << (gap->passed ? "PASS" : "FAIL") << "\n";
  }
  return kExitOk;
}

int run_blocks(const BlocksArgs& a, std::ostream& out) {
  const SequenceData data{read_coefficients_file(a.input), a.sigma2};
  const MonotoneFit fit = fit_mmle(data);
  out << "blocks: " << fit.blocks.blocks.size() << "\n";
  for (const auto& b : fit.blocks.blocks) {
    const double prior = std::max(b.value, 0.0);
    out << "  [" << (b.start + 1) << ", " << (b.end + 1) << "] value " << format_double(b.value)
        << " prior_variance " << format_double(prior) << " shrink_factor "
        << format_double(fit.shrink_factors[b.start]) << "\n";
  }
  out << "prior_variances: " << join(fit.prior_variances) << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive monotone shrinkage for orthonormal-design regression", "monoshrink"};
  app.set_version_flag("--version", std::string(MONOSHRINK_VERSION));
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the monotone shrinkage estimator");
  fit_cmd->add_option("--input", fit.input, "CSV with a single 'beta_tilde' column");
  fit_cmd->add_option("--sigma2", fit.sigma2, "Noise variance");
  fit_cmd->add_flag("--estimate-variance", fit.estimate_variance,
                    "Estimate sigma2 jointly from --design/--response");
  fit_cmd->add_option("--design", fit.design, "Design matrix CSV (orthonormal columns)");
  fit_cmd->add_option("--response", fit.response, "Response CSV (one column)");
  fit_cmd->add_flag("--orthonormalize", fit.orthonormalize,
                    "QR-orthonormalize the design instead of validating it");
  fit_cmd->add_option("--out", fit.out, "Output JSON")->capture_default_str();

  VarianceArgs var;
  auto* var_cmd = app.add_subcommand("estimate-variance", "Estimate the noise variance");
  var_cmd->add_option("--design", var.design, "Design matrix CSV")->required();
  var_cmd->add_option("--response", var.response, "Response CSV")->required();
  var_cmd->add_flag("--orthonormalize", var.orthonormalize,
                    "QR-orthonormalize the design instead of validating it");
  var_cmd->add_option("--out", var.out, "Output JSON")->capture_default_str();

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Run every estimator on one coefficient vector");
  cmp_cmd->add_option("--input", cmp.input, "CSV with a single 'beta_tilde' column")->required();
  cmp_cmd->add_option("--sigma2", cmp.sigma2, "Noise variance")->required();
  cmp_cmd->add_option("--out", cmp.out, "Output CSV")->capture_default_str();
  cmp_cmd->add_option("--ridge-lambda", cmp.ridge_lambda, "Penalty for fixed ridge")
      ->capture_default_str();
  cmp_cmd->add_option("--design", cmp.design, "Design CSV, enables cross-validated ridge");
  cmp_cmd->add_option("--response", cmp.response, "Response CSV, enables cross-validated ridge");
  cmp_cmd->add_option("--folds", cmp.folds, "CV folds")->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.seed, "Fold assignment seed")->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo Bayes-risk comparison");
  sim_cmd->add_option("--scenario", sim.scenario, "decay | flat | sparse | increasing")
      ->required()
      ->check(CLI::IsMember({"decay", "flat", "sparse", "increasing"}));
  sim_cmd->add_option("--p", sim.p, "Number of coefficients")->capture_default_str();
  sim_cmd->add_option("--sigma2", sim.sigma2, "Noise variance")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Random seed (required)");
  sim_cmd->add_option("--out", sim.out, "Report JSON")->capture_default_str();
  sim_cmd->add_option("--csv", sim.csv, "Tidy per-replicate MSE CSV");
  sim_cmd->add_option("--workers", sim.workers, "Worker threads")->capture_default_str();
  sim_cmd->add_option("--df", sim.df, "Chi-square degrees of freedom for the variance profile")
      ->capture_default_str();
  sim_cmd->add_flag("--sparse-signals-first", sim.sparse_signals_first,
                    "Sparse scenario: put the non-zero variances first");
  sim_cmd->add_option("--estimators", sim.estimators, "Comma-separated estimator names")
      ->delimiter(',');
  sim_cmd->add_option("--design-rows", sim.design_rows, "Rows of the ridge-CV design (0 = 2p)")
      ->capture_default_str();

  BlocksArgs blk;
  auto* blk_cmd = app.add_subcommand("blocks", "Print the pooled block partition");
  blk_cmd->add_option("--input", blk.input, "CSV with a single 'beta_tilde' column")->required();
  blk_cmd->add_option("--sigma2", blk.sigma2, "Noise variance")->required();

  std::vector<const char*> argv{"monoshrink"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return run_fit(fit, out);
    if (*var_cmd) return run_estimate_variance(var, out);
    if (*cmp_cmd) return run_compare(cmp, out, err);
    if (*sim_cmd) return run_simulate(sim, out);
    if (*blk_cmd) return run_blocks(blk, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace monoshrink::cli
