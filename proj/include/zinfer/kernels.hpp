#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zinfer/zicore.hpp"

/// Per-observation kernels behind the regression score, information and
/// likelihood. Two implementations share one interface:
///
///   serial::  plain loops with rank-one updates, kept as the reference;
///   omp::     fixed-size row blocks evaluated in parallel and reduced in
///             block order, so results do not depend on the thread count.
///
/// The unqualified names dispatch to omp:: (which degrades to a blocked
/// serial loop when OpenMP is unavailable).
namespace zinfer::kernels {

struct ObsEval {
  ZiDerived d;
  double s_theta;
  double s_gamma;
  double loglik;
  double f_tt;  ///< expected information entries at (theta_i, gamma_i)
  double f_tg;
  double f_gg;
};

struct Inputs {
  const BaseCount& base;
  const ZiType& type;
  bool null_zi;
  const Eigen::VectorXd& theta;
  const Eigen::VectorXd& gamma;
  std::span<const Count> y;
};

/// Rows per reduction block in the parallel kernels.
inline constexpr Eigen::Index kBlockRows = 256;

namespace serial {
std::vector<ObsEval> evaluate(const Inputs& in);
Eigen::VectorXd score(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa);
Eigen::MatrixXd info(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa);
double loglik(std::span<const ObsEval> obs);
/// X^T diag(w) X
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w);
/// X^T r
Eigen::VectorXd cross(const Eigen::MatrixXd& x, const Eigen::VectorXd& r);
}  // namespace serial

namespace omp {
std::vector<ObsEval> evaluate(const Inputs& in);
Eigen::VectorXd score(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa);
Eigen::MatrixXd info(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa);
double loglik(std::span<const ObsEval> obs);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w);
Eigen::VectorXd cross(const Eigen::MatrixXd& x, const Eigen::VectorXd& r);
/// Threads the parallel kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int n);
}  // namespace omp

using omp::cross;
using omp::evaluate;
using omp::info;
using omp::loglik;
using omp::score;
using omp::weighted_gram;

/// Single-observation evaluation shared by both implementations.
ObsEval evaluate_one(const BaseCount& base, const ZiType& type, bool null_zi, double theta, double gamma,
                     Count y);

}  // namespace zinfer::kernels
