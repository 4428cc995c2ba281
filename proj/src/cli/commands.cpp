#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>

#include "zinfer/cli.hpp"
#include "zinfer/errors.hpp"
#include "zinfer/numeric.hpp"

namespace zinfer::cli {

namespace {

constexpr const char* kIntercept = "intercept";

double parse_number(const std::string& text, const std::string& what)
{
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value))
    throw InputError(what + ": '" + text + "' is not a finite number");
  return value;
}

Count parse_count(const std::string& text, const std::string& what)
{
  const double value = parse_number(text, what);
  if (value != std::floor(value) || std::abs(value) > 9.0e15)
    throw InputError(what + ": '" + text + "' is not an integer count");
  return static_cast<Count>(value);
}

std::string fmt12(double x)
{
  if (!std::isfinite(x))
    return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

bool contains(const std::vector<std::string>& list, const std::string& item)
{
  return std::find(list.begin(), list.end(), item) != list.end();
}

struct Design {
  Eigen::MatrixXd x;
  std::vector<std::string> names;
};

// Implicit intercept unless --no-intercept; naming "intercept" in the list
// always requests one.
Design design_for(const CsvTable& table, const std::vector<std::size_t>& rows,
                  const std::vector<std::string>& covariates, bool no_intercept)
{
  Design d;
  const bool intercept = !no_intercept || contains(covariates, kIntercept);
  std::vector<std::size_t> cols;
  if (intercept)
    d.names.emplace_back(kIntercept);
  for (const std::string& name : covariates) {
    if (name == kIntercept || contains(d.names, name))
      continue;
    cols.push_back(table.column(name));
    d.names.push_back(name);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  d.x.resize(n, static_cast<Eigen::Index>(d.names.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    if (intercept)
      d.x(i, j++) = 1.0;
    for (std::size_t c : cols)
      d.x(i, j++) = parse_number(table.rows[rows[static_cast<std::size_t>(i)]][c],
                                 "column '" + table.header[c] + "', data row " + std::to_string(rows[i] + 1));
  }
  return d;
}

bool no_inflation(const std::vector<std::string>& alpha_covariates)
{
  return alpha_covariates.size() == 1 && alpha_covariates[0] == "none";
}

BaseCount parse_base(const std::string& text)
{
  try {
    return BaseCount::parse(text);
  }
  catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

template <typename F>
void write_to(const std::string& path, std::ostream& fallback, F&& body)
{
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw InputError("cannot write output file '" + path + "'");
  body(file);
}

struct Loaded {
  BaseCount base = BaseCount::poisson();
  CsvTable table;
  std::vector<std::size_t> kept;
  Dataset data;
};

Loaded load(const RunConfig& config)
{
  if (config.data_path.empty())
    throw InputError("--data is required");
  Loaded l;
  l.base = parse_base(config.base);
  l.table = read_csv_file(config.data_path);
  l.data = build_dataset(l.table, config, l.base);
  const std::size_t resp = l.table.column(config.response);
  for (std::size_t r = 0; r < l.table.rows.size(); ++r) {
    const Count y = parse_count(l.table.rows[r][resp], "response");
    if (!config.drop_response_above || y <= *config.drop_response_above)
      l.kept.push_back(r);
  }
  return l;
}

void check_fittable(const TypeChoice& choice)
{
  if (!choice.estimate_tau && !choice.type.monotone())
    throw InputError("zero-inflation type " + choice.label +
                     " is not monotone (the omega = gamma log(pi0) pathology); fitting would weight zeros "
                     "negatively");
}

}  // namespace

Dataset build_dataset(const CsvTable& table, const RunConfig& config, const BaseCount& base)
{
  const std::size_t resp = table.column(config.response);
  Dataset data;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const Count y = parse_count(table.rows[r][resp], "response column '" + config.response + "', data row " +
                                                         std::to_string(r + 1));
    if (config.drop_response_above && y > *config.drop_response_above)
      continue;
    data.y.push_back(y);
    rows.push_back(r);
  }
  Design xb = design_for(table, rows, config.theta_covariates, config.no_intercept);
  data.x_beta = std::move(xb.x);
  data.beta_names = std::move(xb.names);
  if (no_inflation(config.alpha_covariates)) {
    data.x_alpha = Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), 0);
  }
  else {
    Design xa = design_for(table, rows, config.alpha_covariates, config.no_intercept);
    data.x_alpha = std::move(xa.x);
    data.alpha_names = std::move(xa.names);
  }
  try {
    data.validate(base);
  }
  catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return data;
}

TypeChoice TypeChoice::parse(const std::string& text)
{
  TypeChoice c;
  c.label = text;
  if (text == "estimate-tau") {
    c.estimate_tau = true;
    return c;
  }
  try {
    c.type = ZiType::parse(text);
  }
  catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return c;
}

FitResult run_fit(const Dataset& data, const BaseCount& base, const TypeChoice& choice, const FitOptions& options)
{
  if (choice.estimate_tau)
    return fit_joint_estimate_tau(data, base, options);
  return fit_joint(data, base, choice.type, options);
}

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err)
{
  const TypeChoice choice = TypeChoice::parse(config.zi_type);
  check_fittable(choice);
  const Loaded l = load(config);
  const FitOptions options = FitOptions::from_env();
  const FitResult fit = run_fit(l.data, l.base, choice, options);
  const nlohmann::ordered_json report = fit_report(fit, choice);
  write_to(config.output, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  if (!fit.converged) {
    err << "zinfer: fit did not converge: " << fit.message << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

namespace {

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s)
    q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + '"';
}

}  // namespace

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err)
{
  std::vector<TypeChoice> choices;
  for (const std::string& t : config.types)
    choices.push_back(TypeChoice::parse(t));
  const Loaded l = load(config);
  const FitOptions options = FitOptions::from_env();

  std::vector<FitResult> fits;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const TypeChoice& c : choices) {
    try {
      check_fittable(c);
      fits.push_back(run_fit(l.data, l.base, c, options));
    }
    catch (const Error& e) {
      failures.emplace_back(c.label, e.what());
      err << "zinfer: type " << c.label << " failed: " << e.what() << '\n';
    }
  }
  const std::vector<ComparisonRow> rows = compare(fits, l.data);
  const nlohmann::ordered_json report = compare_report(rows, failures, l.data);
  write_to(config.output, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  if (!config.csv_output.empty()) {
    write_to(config.csv_output, out, [&](std::ostream& os) {
      os << "rank,type,tau1,tau2,loglik,k,aic,bic,converged,status\n";
      for (const ComparisonRow& r : rows)
        os << r.rank << ',' << csv_field(r.type_name) << ',' << fmt12(r.tau1) << ',' << fmt12(r.tau2) << ','
           << fmt12(r.loglik) << ',' << r.k << ',' << fmt12(r.aic) << ',' << fmt12(r.bic) << ','
           << (r.converged ? 1 : 0) << ",ok\n";
      for (const auto& f : failures)
        os << "NA," << csv_field(f.first) << ",NA,NA,NA,NA,NA,NA,0,failed\n";
    });
  }
  const bool all_converged =
      std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.converged; });
  return failures.empty() && all_converged ? kExitOk : kExitNotConverged;
}

int cmd_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err)
{
  const TypeChoice choice = TypeChoice::parse(config.zi_type);
  check_fittable(choice);
  const Loaded l = load(config);
  const FitResult fit = run_fit(l.data, l.base, choice, FitOptions::from_env());
  const std::vector<DiagnosticRow> pairs = diagnostics_pairs(fit, l.data);

  // Covariates named on either side, each once, as they appear in the data.
  std::vector<std::size_t> extra;
  for (const auto* list : {&config.theta_covariates, &config.alpha_covariates})
    for (const std::string& name : *list)
      if (name != kIntercept && name != "none" &&
          std::find(extra.begin(), extra.end(), l.table.column(name)) == extra.end())
        extra.push_back(l.table.column(name));

  write_to(config.output, out, [&](std::ostream& os) {
    os << "row,pi0,pi0_tilde,logit_pi0,logit_pi0_tilde,omega," << config.response;
    for (std::size_t c : extra)
      os << ',' << l.table.header[c];
    os << '\n';
    for (const DiagnosticRow& d : pairs) {
      const std::size_t src = l.kept[d.index];
      os << src + 1 << ',' << fmt12(d.pi0) << ',' << fmt12(d.pi0_tilde) << ',' << fmt12(d.logit_pi0) << ','
         << fmt12(d.logit_pi0_tilde) << ',' << fmt12(d.omega) << ',' << l.data.y[d.index];
      for (std::size_t c : extra)
        os << ',' << l.table.rows[src][c];
      os << '\n';
    }
  });
  if (!fit.converged) {
    err << "zinfer: fit did not converge: " << fit.message << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

namespace {

struct Generator {
  std::string name;
  std::string dist;
  std::vector<double> args;
};

// "x1:normal(0,1),x2:bernoulli(0.5),x3:uniform(-1,1)"
std::vector<Generator> parse_generate(const std::string& text)
{
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(')
      ++depth;
    if (c == ')')
      --depth;
    if (c == ',' && depth == 0) {
      items.push_back(cur);
      cur.clear();
    }
    else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty())
    items.push_back(cur);

  std::vector<Generator> out;
  for (const std::string& item : items) {
    const auto colon = item.find(':');
    const auto open = item.find('(');
    if (colon == std::string::npos || open == std::string::npos || item.back() != ')' || open < colon)
      throw InputError("--generate item '" + item + "' is not name:dist(args)");
    Generator g;
    g.name = item.substr(0, colon);
    g.dist = item.substr(colon + 1, open - colon - 1);
    std::string args = item.substr(open + 1, item.size() - open - 2);
    std::size_t pos = 0;
    while (pos <= args.size() && !args.empty()) {
      const auto comma = args.find(',', pos);
      g.args.push_back(parse_number(args.substr(pos, comma - pos), "--generate " + g.name));
      if (comma == std::string::npos)
        break;
      pos = comma + 1;
    }
    const std::size_t want = g.dist == "bernoulli" ? 1 : 2;
    if ((g.dist != "normal" && g.dist != "uniform" && g.dist != "bernoulli") || g.args.size() != want)
      throw InputError("--generate " + g.name + ": use normal(mean,sd), uniform(lo,hi) or bernoulli(p)");
    out.push_back(std::move(g));
  }
  return out;
}

double draw(const Generator& g, Rng& rng)
{
  if (g.dist == "bernoulli")
    return uniform01(rng) < g.args[0] ? 1.0 : 0.0;
  if (g.dist == "uniform")
    return g.args[0] + (g.args[1] - g.args[0]) * uniform01(rng);
  // Box-Muller from our own uniforms keeps the stream identical across standard libraries.
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return g.args[0] + g.args[1] * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream&)
{
  const BaseCount base = parse_base(config.base);
  const TypeChoice choice = TypeChoice::parse(config.zi_type);
  if (choice.estimate_tau)
    throw InputError("simulate needs a fixed zero-inflation type, not estimate-tau");
  Rng rng(config.seed);

  // Covariate table, either read or generated; values are rounded to the
  // printed precision before use so the output file is the exact data.
  CsvTable table;
  if (!config.design_path.empty()) {
    if (!config.generate.empty())
      throw InputError("give either --design or --generate, not both");
    table = read_csv_file(config.design_path);
    if (config.n != 0 && config.n != table.rows.size())
      throw InputError("--n disagrees with the " + std::to_string(table.rows.size()) + " design rows");
  }
  else {
    if (config.n == 0)
      throw InputError("simulate needs --n (or a --design file)");
    const std::vector<Generator> gens = config.generate.empty() ? std::vector<Generator>{}
                                                                : parse_generate(config.generate);
    for (const Generator& g : gens)
      table.header.push_back(g.name);
    table.rows.assign(config.n, std::vector<std::string>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j)
      for (std::size_t i = 0; i < config.n; ++i)
        table.rows[i][j] = fmt12(draw(gens[j], rng));
  }
  if (contains(table.header, config.response))
    throw InputError("response name '" + config.response + "' clashes with a covariate column");

  std::vector<std::size_t> rows(table.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = i;
  const Design xb = design_for(table, rows, config.theta_covariates, config.no_intercept);
  if (static_cast<Eigen::Index>(config.beta.size()) != xb.x.cols())
    throw InputError("--beta has " + std::to_string(config.beta.size()) + " values but the theta design has " +
                     std::to_string(xb.x.cols()) + " columns");
  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(config.beta.data(), xb.x.cols());
  const Eigen::VectorXd theta = xb.x * beta;

  const bool inflated = config.alpha.has_value() && !no_inflation(config.alpha_covariates);
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(theta.size());
  if (inflated) {
    const Design xa = design_for(table, rows, config.alpha_covariates, config.no_intercept);
    if (static_cast<Eigen::Index>(config.alpha->size()) != xa.x.cols())
      throw InputError("--alpha has " + std::to_string(config.alpha->size()) +
                       " values but the alpha design has " + std::to_string(xa.x.cols()) + " columns");
    gamma = xa.x * Eigen::Map<const Eigen::VectorXd>(config.alpha->data(), xa.x.cols());
  }

  std::vector<Count> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const ZiModel model{base, choice.type, theta(r), gamma(r)};
    const ZiDerived d = inflated ? derived(model) : derived_null(base, theta(r));
    y[i] = simulate_one(model, d, rng);
  }

  write_to(config.output, out, [&](std::ostream& os) {
    os << config.response;
    for (const std::string& h : table.header)
      os << ',' << h;
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << y[i];
      for (const std::string& v : table.rows[i])
        os << ',' << v;
      os << '\n';
    }
  });
  return kExitOk;
}

}  // namespace zinfer::cli
