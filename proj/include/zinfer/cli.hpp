#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zinfer/errors.hpp"
#include "zinfer/fit.hpp"
#include "zinfer/modelsel.hpp"

namespace zinfer::cli {

/// Bad flags, unreadable files, missing columns: exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNotConverged = 2;

struct RunConfig {
  std::string subcommand;
  std::string data_path;
  std::string response = "y";
  std::vector<std::string> theta_covariates;
  /// "intercept" alone means an intercept-only degree; "none" means no inflation.
  std::vector<std::string> alpha_covariates{"intercept"};
  std::string base = "poisson";
  std::string zi_type = "multiplicative";
  std::vector<std::string> types{"hurdle", "multiplicative", "additive"};
  std::optional<std::int64_t> drop_response_above;
  std::uint64_t seed = 1;
  std::string output;
  std::string csv_output;
  bool no_intercept = false;

  // simulate
  std::size_t n = 0;
  std::vector<double> beta;
  std::optional<std::vector<double>> alpha;
  std::string generate;
  std::string design_path;
};

/// Parses argv into a RunConfig. Returns the exit code to stop with when
/// parsing ends the run (help, or a parse error already printed), otherwise nullopt.
std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out,
                              std::ostream& err);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  ///< throws InputError naming the column
};

CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

/// The model's data from a table: response filter, implicit intercepts,
/// covariate lists resolved against the header.
Dataset build_dataset(const CsvTable& table, const RunConfig& config, const BaseCount& base);

/// Either a fixed type or "estimate-tau".
struct TypeChoice {
  bool estimate_tau = false;
  ZiType type = ZiType::multiplicative();
  std::string label;

  static TypeChoice parse(const std::string& text);
};

FitResult run_fit(const Dataset& data, const BaseCount& base, const TypeChoice& choice, const FitOptions& options);

/// Value rounded to 12 significant digits, the precision of every reported number.
double round12(double x);

nlohmann::ordered_json fit_report(const FitResult& fit, const TypeChoice& choice);
nlohmann::ordered_json compare_report(const std::vector<ComparisonRow>& rows,
                                      const std::vector<std::pair<std::string, std::string>>& failures,
                                      const Dataset& data);

/// Re-evaluates the log-likelihood from a report's parameters.
double loglik_from_report(const nlohmann::json& report, const Dataset& data);

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.subcommand.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map errors to exit codes.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zinfer::cli
