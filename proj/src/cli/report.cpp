#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "zinfer/cli.hpp"
#include "zinfer/errors.hpp"

namespace zinfer::cli {

double round12(double x)
{
  if (!std::isfinite(x))
    return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double x)
{
  if (!std::isfinite(x))
    return nullptr;
  return round12(x);
}

ojson estimate(double value, double se) { return ojson{{"estimate", number(value)}, {"se", number(se)}}; }

double aic(double loglik, Eigen::Index k) { return -2.0 * loglik + 2.0 * static_cast<double>(k); }

double bic(double loglik, Eigen::Index k, std::size_t n)
{
  return -2.0 * loglik + static_cast<double>(k) * std::log(static_cast<double>(n));
}

}  // namespace

ojson fit_report(const FitResult& fit, const TypeChoice& choice)
{
  const Eigen::VectorXd se = fit.standard_errors();
  const Eigen::Index p = fit.beta.size();
  const Eigen::Index q = fit.alpha.size();
  auto se_at = [&](Eigen::Index i) {
    return fit.omega_identified || i < p ? se(i) : std::numeric_limits<double>::quiet_NaN();
  };

  ojson model;
  model["base"] = fit.base.name();
  model["zi_type"] = choice.label;
  model["tau"] = ojson::array({number(fit.tau1()), number(fit.tau2())});
  model["tau_estimated"] = fit.tau_estimated;

  ojson beta = ojson::object();
  for (Eigen::Index i = 0; i < p; ++i)
    beta[fit.beta_names[static_cast<std::size_t>(i)]] = estimate(fit.beta(i), se_at(i));
  ojson alpha = ojson::object();
  for (Eigen::Index i = 0; i < q; ++i)
    alpha[fit.alpha_names[static_cast<std::size_t>(i)]] = estimate(fit.alpha(i), se_at(p + i));

  ojson coefficients;
  coefficients["beta"] = std::move(beta);
  coefficients["alpha"] = std::move(alpha);
  if (fit.tau_estimated) {
    coefficients["tau"] = ojson{{"tau1", estimate(fit.tau1(), se_at(p + q))},
                                {"tau2", estimate(fit.tau2(), se_at(p + q + 1))}};
  }

  const Eigen::Index k = fit.parameter_count();
  ojson r;
  r["model"] = std::move(model);
  r["coefficients"] = std::move(coefficients);
  r["loglik"] = number(fit.loglik);
  r["k"] = k;
  r["aic"] = number(aic(fit.loglik, k));
  r["bic"] = number(bic(fit.loglik, k, fit.n));
  r["ess"] = number(fit.ess);
  r["n"] = fit.n;
  r["n0"] = fit.n0;
  r["converged"] = fit.converged;
  r["iterations"] = fit.iterations;
  r["omega_identified"] = fit.omega_identified;
  r["near_singular"] = fit.near_singular;
  r["separation"] = fit.separation;
  r["message"] = fit.message;
  return r;
}

ojson compare_report(const std::vector<ComparisonRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& failures, const Dataset& data)
{
  ojson table = ojson::array();
  for (const ComparisonRow& row : rows) {
    ojson o;
    o["rank"] = row.rank;
    o["type"] = row.type_name;
    o["tau"] = ojson::array({number(row.tau1), number(row.tau2)});
    o["tau_estimated"] = row.tau_estimated;
    o["loglik"] = number(row.loglik);
    o["k"] = row.k;
    o["aic"] = number(row.aic);
    o["bic"] = number(row.bic);
    o["converged"] = row.converged;
    o["status"] = "ok";
    table.push_back(std::move(o));
  }
  for (const auto& [type, message] : failures)
    table.push_back(ojson{{"rank", nullptr}, {"type", type}, {"status", "failed"}, {"message", message}});

  ojson r;
  r["n"] = data.n();
  r["n0"] = data.n_zero();
  r["rows"] = std::move(table);
  return r;
}

double loglik_from_report(const nlohmann::json& report, const Dataset& data)
{
  try {
    const auto& model = report.at("model");
    FitResult fit;
    fit.base = BaseCount::parse(model.at("base").get<std::string>());
    const std::string label = model.at("zi_type").get<std::string>();
    const auto& tau = model.at("tau");
    fit.type = label == "mixture" ? ZiType::mixture()
                                  : ZiType::tau_family(tau.at(0).get<double>(), tau.at(1).get<double>());
    fit.omega_identified = report.at("omega_identified").get<bool>();

    const auto& coef = report.at("coefficients");
    fit.beta.resize(data.p());
    for (Eigen::Index i = 0; i < data.p(); ++i)
      fit.beta(i) = coef.at("beta").at(data.beta_names[static_cast<std::size_t>(i)]).at("estimate").get<double>();
    fit.alpha.resize(data.q());
    if (fit.omega_identified)
      for (Eigen::Index i = 0; i < data.q(); ++i)
        fit.alpha(i) =
            coef.at("alpha").at(data.alpha_names[static_cast<std::size_t>(i)]).at("estimate").get<double>();
    return log_likelihood(fit, data);
  }
  catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace zinfer::cli
