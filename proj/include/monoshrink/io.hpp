#ifndef MONOSHRINK_IO_HPP
#define MONOSHRINK_IO_HPP

// File formats: dense numeric CSV with a header row, the fit report JSON, and
// the simulation report JSON / tidy CSV.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "monoshrink/shrinkage.hpp"
#include "monoshrink/simulation.hpp"

namespace monoshrink {

using Json = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double, at most 17 significant digits.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Header row required; '#' lines and blank lines are skipped. Throws DataError
/// carrying the 1-based line number on ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Single-column file with header `beta_tilde`.
Eigen::VectorXd read_coefficients_file(const std::filesystem::path& path);

/// Single-column numeric file with any header.
Eigen::VectorXd read_vector_file(const std::filesystem::path& path);

struct FitBlock {
  /// 1-based inclusive bounds.
  Eigen::Index start = 1;
  Eigen::Index end = 1;
  double value = 0.0;
};

struct FitReportFile {
  Eigen::Index p = 0;
  double sigma2 = 1.0;
  std::string sigma2_source = "given";
  Eigen::VectorXd prior_variances;
  Eigen::VectorXd shrink_factors;
  Eigen::VectorXd beta_hat;
  std::vector<FitBlock> blocks;
  double sure_value = 0.0;
  double objective_value = 0.0;

  static FitReportFile from_fit(const MonotoneFit& fit, const SequenceData& data,
                                std::string sigma2_source);
  Json to_json() const;
  /// Throws DataError on missing keys, wrong lengths or broken fit invariants.
  static FitReportFile from_json(const Json& j);
};

Json to_json(const Scenario& scenario);
Json to_json(const RiskReport& report);
Json to_json(const OracleGapCheck& check);

/// Columns estimator,replicate,mse (replicate is 1-based).
void write_mse_csv(std::ostream& out, const RiskReport& report);

/// Writes text, throwing DataError if the file cannot be opened.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace monoshrink

#endif  // MONOSHRINK_IO_HPP
