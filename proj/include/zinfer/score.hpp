#pragma once

#include <Eigen/Dense>

#include "zinfer/dataset.hpp"
#include "zinfer/zicore.hpp"

namespace zinfer {

struct ScorePair {
  double s_theta;
  double s_gamma;
};

/// d log pi~_y / d(theta, gamma) for an exponential-family base:
/// s_theta = psi^{1{y=0}} (y - phi mu), s_gamma = (1{y=0} - pi0~) v.
ScorePair score_obs(const ZiModel& model, Count y);
ScorePair score_obs(const ZiDerived& d, Count y);

/// G H G^T with G = [[1, -u mu], [0, v]] and H = Var[(y~, 1{y~=0})].
Eigen::Matrix2d expected_info(const ZiModel& model);
Eigen::Matrix2d expected_info(const ZiDerived& d);

/// Negative Hessian of log pi~_y in (theta, gamma). Analytic for the tau
/// family; central differences of the analytic score for the mixture.
Eigen::Matrix2d observed_info(const ZiModel& model, Count y);

/// Coefficients of a regression fit: theta_i = x_i^beta beta, gamma_i = x_i^alpha alpha.
/// With no alpha columns omega is held at zero (no inflation) whatever the type.
struct FitState {
  BaseCount base;
  ZiType type;
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;
};

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& coef);

/// Per-observation derived quantities at the state's coefficients. Throws
/// InflationOverflow if any pi0~_i reaches 1 - 1e-12.
std::vector<ZiDerived> observation_terms(const FitState& state, const Dataset& data);

/// Gradient of the total log-likelihood: beta block then alpha block.
Eigen::VectorXd regression_score(const FitState& state, const Dataset& data);

struct RegressionInfo {
  Eigen::MatrixXd matrix;
  double condition = 0.0;
  bool near_singular = false;
};

inline constexpr double kNearSingularCondition = 1e10;

/// Sum over observations of [x^beta; x^alpha]^T FI(theta_i, gamma_i) [x^beta; x^alpha].
RegressionInfo regression_expected_info(const FitState& state, const Dataset& data);

double regression_loglik(const FitState& state, const Dataset& data);

}  // namespace zinfer
