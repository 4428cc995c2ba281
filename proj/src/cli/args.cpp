#include <ostream>

#include <CLI11.hpp>

#include "zinfer/cli.hpp"
#include "zinfer/errors.hpp"

namespace zinfer::cli {

namespace {

struct Flags {
  std::int64_t drop_above = 0;
  std::vector<double> alpha;
  std::vector<std::string> types;
};

void add_data_options(CLI::App* sub, RunConfig& c, Flags& f)
{
  sub->add_option("--data", c.data_path, "CSV file with a header row")->required();
  sub->add_option("--response", c.response, "Response column (non-negative integer counts)");
  sub->add_option("--theta-covariates", c.theta_covariates, "Location covariates, comma separated")
      ->delimiter(',');
  sub->add_option("--alpha-covariates", c.alpha_covariates,
                  "Inflation-degree covariates: 'intercept', a list, or 'none' for no inflation")
      ->delimiter(',');
  sub->add_option("--base", c.base, "poisson | binomial:N");
  sub->add_option("--drop-response-above", f.drop_above, "Drop rows whose response exceeds this value");
  sub->add_flag("--no-intercept", c.no_intercept, "Do not add intercept columns implicitly");
  sub->add_option("--output,-o", c.output, "Output path (default: standard output)");
  sub->add_option("--seed", c.seed, "Random seed");
}

// Splits a comma-separated type list, keeping "custom:t1,t2" in one piece.
std::vector<std::string> split_types(const std::vector<std::string>& raw)
{
  std::vector<std::string> out;
  for (const std::string& entry : raw) {
    std::size_t start = 0;
    while (start <= entry.size()) {
      std::size_t end = entry.find(',', start);
      if (entry.compare(start, 7, "custom:") == 0 && end != std::string::npos)
        end = entry.find(',', end + 1);
      if (end == std::string::npos)
        end = entry.size();
      if (end > start)
        out.push_back(entry.substr(start, end - start));
      start = end + 1;
    }
  }
  return out;
}

const char* kTypeHelp = "multiplicative | additive | hurdle | mixture | custom:tau1,tau2 | estimate-tau";

}  // namespace

std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out,
                              std::ostream& err)
{
  CLI::App app{"zinfer: zero-inflated count regression"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* fit = app.add_subcommand("fit", "Fit one zero-inflation type and write a JSON report");
  add_data_options(fit, config, flags);
  fit->add_option("--zi-type", config.zi_type, kTypeHelp);

  CLI::App* compare = app.add_subcommand("compare", "Fit several types and rank them by AIC");
  add_data_options(compare, config, flags);
  compare->add_option("--types", flags.types, "Types to compare, comma separated (custom:t1,t2 allowed)");
  compare->add_option("--csv-output", config.csv_output, "Also write the table as CSV");

  CLI::App* diagnose = app.add_subcommand("diagnose", "Fit and write the (pi0, pi0~) pairs as CSV");
  add_data_options(diagnose, config, flags);
  diagnose->add_option("--zi-type", config.zi_type, kTypeHelp);

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate a data set from given coefficients");
  simulate->add_option("--n", config.n, "Rows to generate");
  simulate->add_option("--beta", config.beta, "Location coefficients, comma separated")
      ->delimiter(',')
      ->required();
  CLI::Option* alpha_opt =
      simulate->add_option("--alpha", flags.alpha, "Degree coefficients; omit for no inflation")->delimiter(',');
  simulate->add_option("--generate", config.generate, "Covariates to generate, e.g. x:normal(0,1),z:bernoulli(0.5)");
  simulate->add_option("--design", config.design_path, "CSV of covariate values instead of --generate");
  simulate->add_option("--response", config.response, "Name of the response column");
  simulate->add_option("--theta-covariates", config.theta_covariates, "Location covariates")->delimiter(',');
  simulate->add_option("--alpha-covariates", config.alpha_covariates, "Inflation-degree covariates")
      ->delimiter(',');
  simulate->add_option("--base", config.base, "poisson | binomial:N");
  simulate->add_option("--zi-type", config.zi_type, "multiplicative | additive | hurdle | mixture | custom:tau1,tau2");
  simulate->add_flag("--no-intercept", config.no_intercept, "Do not add intercept columns implicitly");
  simulate->add_option("--output,-o", config.output, "Output path (default: standard output)");
  simulate->add_option("--seed", config.seed, "Random seed");

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  for (CLI::App* sub : {fit, compare, diagnose, simulate})
    if (sub->parsed())
      config.subcommand = sub->get_name();
  if (config.subcommand != "simulate" && app.get_subcommand(config.subcommand)->count("--drop-response-above") > 0)
    config.drop_response_above = flags.drop_above;
  if (alpha_opt->count() > 0)
    config.alpha = flags.alpha;
  if (!flags.types.empty())
    config.types = split_types(flags.types);
  return std::nullopt;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
  if (config.subcommand == "fit")
    return cmd_fit(config, out, err);
  if (config.subcommand == "compare")
    return cmd_compare(config, out, err);
  if (config.subcommand == "diagnose")
    return cmd_diagnose(config, out, err);
  if (config.subcommand == "simulate")
    return cmd_simulate(config, out, err);
  throw InputError("unknown subcommand '" + config.subcommand + "'");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  RunConfig config;
  if (const auto stop = parse_args(argc, argv, config, out, err))
    return *stop;
  try {
    return run(config, out, err);
  }
  catch (const InputError& e) {
    err << "zinfer: " << e.what() << '\n';
    return kExitInput;
  }
  catch (const DomainError& e) {
    err << "zinfer: " << e.what() << '\n';
    return kExitInput;
  }
  catch (const Error& e) {
    err << "zinfer: " << e.what() << '\n';
    return kExitNotConverged;
  }
  catch (const std::exception& e) {
    err << "zinfer: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace zinfer::cli
