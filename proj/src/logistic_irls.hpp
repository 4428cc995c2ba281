#pragma once

#include <Eigen/Dense>

#include "zinfer/fit.hpp"

namespace zinfer::detail {

struct LogisticResult {
  Eigen::VectorXd coef;
  Eigen::MatrixXd info;  ///< X^T diag(w p (1 - p)) X at coef
  int iterations = 0;
  bool separated = false;
};

/// Newton-Raphson (IRLS) for a weighted logistic regression with offset:
/// maximises sum_i w_i [t_i eta_i - log(1 + e^eta_i)], eta = offset + X coef.
/// Targets may be fractional. Stops when the score sup-norm reaches tol or
/// the coefficients leave the separation bound.
LogisticResult logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const Eigen::VectorXd& weight,
                             const Eigen::VectorXd& offset, Eigen::VectorXd init, const FitOptions& options,
                             double tol);

/// Inverse when well conditioned, otherwise the pseudo-inverse; reports which.
Eigen::MatrixXd covariance_from_info(const Eigen::MatrixXd& info, double& condition, bool& near_singular);

}  // namespace zinfer::detail
