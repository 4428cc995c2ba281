#include "zinfer/modelsel.hpp"

#include <algorithm>
#include <cmath>

#include "zinfer/errors.hpp"

namespace zinfer {

double log_likelihood(const FitResult& fit, const Dataset& data)
{
  if (!fit.omega_identified || fit.alpha.size() == 0) {
    Dataset null_data = data;
    null_data.x_alpha = Eigen::MatrixXd(data.x_beta.rows(), 0);
    return regression_loglik({fit.base, fit.type, fit.beta, Eigen::VectorXd(0)}, null_data);
  }
  return regression_loglik(fit.state(), data);
}

std::vector<ComparisonRow> compare(const std::vector<FitResult>& fits, const Dataset& data)
{
  const std::uint64_t fp = data.fingerprint();
  const double log_n = std::log(static_cast<double>(data.n()));
  std::vector<ComparisonRow> rows;
  rows.reserve(fits.size());
  for (const FitResult& f : fits) {
    if (f.data_fingerprint != fp)
      throw DomainError("mixed data: fit of type " + f.type.name() + " was made on a different data set");
    ComparisonRow row;
    row.type_name = f.tau_estimated ? "estimate-tau" : f.type.name();
    row.tau1 = f.tau1();
    row.tau2 = f.tau2();
    row.tau_estimated = f.tau_estimated;
    row.loglik = f.loglik;
    row.k = f.parameter_count();
    row.aic = -2.0 * f.loglik + 2.0 * static_cast<double>(row.k);
    row.bic = -2.0 * f.loglik + static_cast<double>(row.k) * log_n;
    row.converged = f.converged;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.aic != b.aic)
      return a.aic < b.aic;
    if (a.k != b.k)
      return a.k < b.k;
    return a.type_name < b.type_name;
  });
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i].rank = static_cast<int>(i) + 1;
  return rows;
}

std::vector<DiagnosticRow> diagnostics_pairs(const FitResult& fit, const Dataset& data)
{
  Dataset eval_data = data;
  FitState state = fit.state();
  if (!fit.omega_identified || fit.alpha.size() == 0) {
    eval_data.x_alpha = Eigen::MatrixXd(data.x_beta.rows(), 0);
    state.alpha = Eigen::VectorXd(0);
  }
  const std::vector<ZiDerived> terms = observation_terms(state, eval_data);
  std::vector<DiagnosticRow> rows;
  rows.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const ZiDerived& d = terms[i];
    rows.push_back({i, d.pi0, d.pi0_tilde, d.logit_pi0, d.logit_pi0_tilde, d.omega});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const DiagnosticRow& a, const DiagnosticRow& b) { return a.pi0 < b.pi0; });
  return rows;
}

}  // namespace zinfer
