#pragma once

#include <string>
#include <vector>

#include "zinfer/fit.hpp"

namespace zinfer {

/// Sum of log pi~_{y_i} at the fitted (theta_i, gamma_i).
double log_likelihood(const FitResult& fit, const Dataset& data);

struct ComparisonRow {
  std::string type_name;
  double tau1 = 0.0;
  double tau2 = 0.0;
  bool tau_estimated = false;
  double loglik = 0.0;
  Eigen::Index k = 0;
  double aic = 0.0;
  double bic = 0.0;
  int rank = 0;  ///< 1-based, by AIC
  bool converged = false;
};

/// One row per fit, sorted by AIC with ties broken by fewer parameters and
/// then by type name. Throws DomainError if the fits are not on the same data.
std::vector<ComparisonRow> compare(const std::vector<FitResult>& fits, const Dataset& data);

struct DiagnosticRow {
  std::size_t index;  ///< row in the original data
  double pi0;
  double pi0_tilde;
  double logit_pi0;
  double logit_pi0_tilde;
  double omega;
};

/// (pi0, pi0~) pairs in linear and logit metrics, sorted by pi0.
std::vector<DiagnosticRow> diagnostics_pairs(const FitResult& fit, const Dataset& data);

}  // namespace zinfer
