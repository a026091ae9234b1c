#include "monoshrink/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "monoshrink/error.hpp"

namespace monoshrink {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
      !std::isfinite(value))
    throw DataError("column " + std::to_string(column) + ": '" + std::string(cell) +
                        "' is not a finite number",
                    line);
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

Eigen::VectorXd single_column(const CsvTable& table, const std::string& what) {
  if (table.values.cols() != 1)
    throw DataError(what + ": expected exactly one column, found " +
                    std::to_string(table.values.cols()));
  if (table.values.rows() == 0) throw DataError(what + ": no data rows");
  return table.values.col(0);
}

Eigen::VectorXd json_vector(const Json& j, const char* key, Eigen::Index expected) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw DataError(std::string("fit report: missing array '") + key + "'");
  const auto& arr = j.at(key);
  if (static_cast<Eigen::Index>(arr.size()) != expected)
    throw DataError(std::string("fit report: '") + key + "' has wrong length");
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    const auto& x = arr.at(static_cast<std::size_t>(i));
    if (!x.is_number()) throw DataError(std::string("fit report: non-numeric entry in '") + key + "'");
    v[i] = x.get<double>();
  }
  return v;
}

Json json_array(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) throw DataError("empty column name in header", line_no);
        table.header.emplace_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw DataError("expected " + std::to_string(table.header.size()) + " cells, found " +
                          std::to_string(cells.size()),
                      line_no);
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], line_no, c + 1));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError("missing header row");

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Eigen::VectorXd read_coefficients_file(const std::filesystem::path& path) {
  const CsvTable table = read_csv_file(path);
  if (table.header.size() != 1 || table.header[0] != "beta_tilde")
    throw DataError(path.string() + ": coefficient file must have the single column 'beta_tilde'", 1);
  return single_column(table, path.string());
}

Eigen::VectorXd read_vector_file(const std::filesystem::path& path) {
  return single_column(read_csv_file(path), path.string());
}

FitReportFile FitReportFile::from_fit(const MonotoneFit& fit, const SequenceData& data,
                                      std::string sigma2_source) {
  FitReportFile f;
  f.p = data.size();
  f.sigma2 = data.sigma2;
  f.sigma2_source = std::move(sigma2_source);
  f.prior_variances = fit.prior_variances;
  f.shrink_factors = fit.shrink_factors;
  f.beta_hat = fit.beta_hat;
  for (const auto& b : fit.blocks.blocks) f.blocks.push_back({b.start + 1, b.end + 1, b.value});
  f.sure_value = fit.sure_value;
  f.objective_value = fit.objective_value;
  return f;
}

Json FitReportFile::to_json() const {
  Json j;
  j["p"] = p;
  j["sigma2"] = sigma2;
  j["sigma2_source"] = sigma2_source;
  j["prior_variances"] = json_array(prior_variances);
  j["shrink_factors"] = json_array(shrink_factors);
  j["beta_hat"] = json_array(beta_hat);
  Json blocks_json = Json::array();
  for (const auto& b : blocks) blocks_json.push_back({{"start", b.start}, {"end", b.end}, {"value", b.value}});
  j["blocks"] = std::move(blocks_json);
  j["sure_value"] = sure_value;
  j["objective_value"] = objective_value;
  return j;
}

FitReportFile FitReportFile::from_json(const Json& j) {
  try {
    FitReportFile f;
    f.p = j.at("p").get<Eigen::Index>();
    if (f.p < 1) throw DataError("fit report: p must be >= 1");
    f.sigma2 = j.at("sigma2").get<double>();
    if (!(f.sigma2 > 0.0)) throw DataError("fit report: sigma2 must be positive");
    f.sigma2_source = j.at("sigma2_source").get<std::string>();
    if (f.sigma2_source != "given" && f.sigma2_source != "estimated")
      throw DataError("fit report: sigma2_source must be 'given' or 'estimated'");
    f.prior_variances = json_vector(j, "prior_variances", f.p);
    f.shrink_factors = json_vector(j, "shrink_factors", f.p);
    f.beta_hat = json_vector(j, "beta_hat", f.p);
    f.sure_value = j.at("sure_value").get<double>();
    f.objective_value = j.at("objective_value").get<double>();

    Eigen::Index expected_start = 1;
    double previous = 0.0;
    for (const auto& b : j.at("blocks")) {
      FitBlock block{b.at("start").get<Eigen::Index>(), b.at("end").get<Eigen::Index>(),
                     b.at("value").get<double>()};
      if (block.start != expected_start || block.end < block.start)
        throw DataError("fit report: blocks are not contiguous and ordered");
      if (!f.blocks.empty() && !(block.value < previous))
        throw DataError("fit report: block values are not strictly decreasing");
      previous = block.value;
      expected_start = block.end + 1;
      f.blocks.push_back(block);
    }
    if (expected_start != f.p + 1) throw DataError("fit report: blocks do not cover 1..p");

    for (Eigen::Index i = 0; i < f.p; ++i) {
      if (f.prior_variances[i] < 0.0 || (i > 0 && f.prior_variances[i] > f.prior_variances[i - 1]))
        throw DataError("fit report: prior variances must be non-negative and non-increasing");
      if (f.shrink_factors[i] < 0.0 || f.shrink_factors[i] >= 1.0)
        throw DataError("fit report: shrink factors must lie in [0, 1)");
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("fit report: ") + e.what());
  }
}

Json to_json(const Scenario& scenario) {
  Json j;
  j["kind"] = std::string(to_string(scenario.kind));
  j["p"] = scenario.p;
  j["sigma2"] = scenario.sigma2;
  j["seed"] = scenario.seed;
  j["prior_variances"] = json_array(scenario.prior_variances);
  return j;
}

Json to_json(const RiskReport& report) {
  Json j;
  j["scenario"] = to_json(report.scenario);
  j["replicates"] = report.replicates;
  j["seed"] = report.seed;
  j["oracle_risk"] = report.oracle_risk;
  j["best_monotone_risk"] = report.best_monotone_risk;
  Json list = Json::array();
  for (const auto& r : report.estimators) {
    Json e;
    e["name"] = std::string(estimator_name(r.estimator));
    e["mean_mse"] = r.mean_mse;
    e["std_error"] = r.std_error;
    if (r.tuning) e["tuning"] = *r.tuning;
    Json samples = Json::array();
    for (double x : r.mse) samples.push_back(x);
    e["mse"] = std::move(samples);
    list.push_back(std::move(e));
  }
  j["estimators"] = std::move(list);
  return j;
}

Json to_json(const OracleGapCheck& check) {
  Json j;
  j["reference"] = check.reference;
  j["reference_risk"] = check.reference_risk;
  j["mmle_risk"] = check.mmle_risk;
  j["gap"] = check.gap;
  j["bound"] = check.bound;
  j["std_error"] = check.std_error;
  j["passed"] = check.passed;
  return j;
}

void write_mse_csv(std::ostream& out, const RiskReport& report) {
  out << "estimator,replicate,mse\n";
  for (const auto& r : report.estimators)
    for (std::size_t i = 0; i < r.mse.size(); ++i)
      out << estimator_name(r.estimator) << ',' << (i + 1) << ',' << format_double(r.mse[i]) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace monoshrink
