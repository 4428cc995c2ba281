#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zinfer/dataset.hpp"
#include "zinfer/score.hpp"

namespace zinfer {

struct FitOptions {
  int max_outer = 500;
  int max_inner = 200;
  int max_halvings = 100;
  int max_em = 20000;
  int max_iid = 200;
  double score_tol = 1e-8;   ///< sup-norm of the full analytic gradient
  double param_tol = 1e-10;  ///< sup-norm change between outer iterations
  double em_tol = 1e-8;      ///< alpha stability in the mixture EM
  double separation_bound = 30.0;

  /// Defaults, with max_outer taken from ZINFER_MAX_ITER when set.
  static FitOptions from_env();
};

struct ObsDiagnostics {
  double pi0;
  double pi0_tilde;
  double phi;
  double psi;
  double omega;
};

struct FitResult {
  BaseCount base = BaseCount::poisson();
  ZiType type = ZiType::multiplicative();
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;
  std::vector<std::string> beta_names;
  std::vector<std::string> alpha_names;
  bool tau_estimated = false;

  double loglik = 0.0;
  /// Joint covariance over (beta, alpha[, tau1, tau2]).
  Eigen::MatrixXd cov;
  bool near_singular = false;
  double info_condition = 0.0;

  bool converged = false;
  int iterations = 0;
  std::vector<double> loglik_trace;
  double score_norm = 0.0;
  bool separation = false;
  /// False when the data carry no zeros, so the inflation degree is unidentified.
  bool omega_identified = true;
  std::string message;

  std::vector<ObsDiagnostics> per_obs;
  double ess = 0.0;  ///< sum of psi_i^{1{y_i=0}}

  std::size_t n = 0;
  std::size_t n0 = 0;
  std::uint64_t data_fingerprint = 0;

  double tau1() const { return type.tau1(); }
  double tau2() const { return type.tau2(); }
  Eigen::Index parameter_count() const;
  Eigen::VectorXd standard_errors() const;
  FitState state() const { return {base, type, beta, alpha}; }
};

/// iid fit by iterative re-scaling of the positive-count mean. Every type
/// returns the same (theta, pi0~); gamma is recovered from the type.
FitResult fit_iid(const BaseCount& base, const ZiType& type, std::span<const Count> y,
                  const FitOptions& options = {});

struct BetaFit {
  Eigen::VectorXd beta;
  int iterations = 0;
  double loglik = 0.0;
};

/// Weighted quasi-likelihood IRLS for beta at fixed alpha: working response
/// y_i / phi_i, case weights psi_i^{1{y_i=0}} phi_i, weights refreshed every
/// step, step-halving on the exact likelihood. Non-monotone types are refused
/// unless allow_nonmonotone is set (used while tau is being estimated).
BetaFit fit_beta_given_alpha(const Dataset& data, const BaseCount& base, const ZiType& type,
                             const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta0,
                             const FitOptions& options = {}, bool allow_nonmonotone = false);

struct AlphaFit {
  Eigen::VectorXd alpha;
  int iterations = 0;
  bool separated = false;
};

/// Logistic IRLS of 1{y=0} on the alpha design with offset
/// tau1 log(pi0) + tau2 log(1 - pi0) + logit(pi0). Tau family only.
AlphaFit fit_alpha_given_beta(const Dataset& data, const BaseCount& base, const ZiType& type,
                              const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha0,
                              const FitOptions& options = {});

/// EM for the mixture: weighted logistic regression of the latent indicator
/// on an augmented data set, one row per positive and two per zero.
AlphaFit fit_mixture_alpha(const Dataset& data, const BaseCount& base, const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& alpha0, const FitOptions& options = {});

struct TauEstimate {
  Eigen::VectorXd alpha;
  double tau1 = 0.0;
  double tau2 = 0.0;
  /// Conditional on beta; ordered (alpha, tau1, tau2).
  Eigen::MatrixXd cov;
  bool near_singular = false;
  bool separated = false;
  int iterations = 0;
};

/// Logistic regression of 1{y=0} on [X_alpha | log pi0 | log(1 - pi0)] with
/// offset logit(pi0). Throws FitError when logit(pi0_i) has sd below 0.05.
TauEstimate estimate_tau(const Dataset& data, const BaseCount& base, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& alpha0, const FitOptions& options = {});

/// Alternating maximum likelihood from the no-inflation start. Throws
/// FitError for invalid data or types; non-convergence is reported in the
/// result rather than thrown.
FitResult fit_joint(const Dataset& data, const BaseCount& base, const ZiType& type, const FitOptions& options = {});

/// As fit_joint, with (tau1, tau2) estimated alongside alpha.
FitResult fit_joint_estimate_tau(const Dataset& data, const BaseCount& base, const FitOptions& options = {});

/// Plain GLM fit (no inflation) of y on X_beta.
Eigen::VectorXd fit_null_glm(const Dataset& data, const BaseCount& base, const FitOptions& options = {});

}  // namespace zinfer
