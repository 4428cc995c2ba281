#include "logistic_irls.hpp"

#include <cmath>
#include <limits>

#include "zinfer/errors.hpp"
#include "zinfer/kernels.hpp"
#include "zinfer/numeric.hpp"

namespace zinfer::detail {

namespace {

double weighted_bernoulli_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& target,
                                 const Eigen::VectorXd& weight)
{
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    total += weight(i) * (target(i) * eta(i) - softplus(eta(i)));
  return total;
}

}  // namespace

LogisticResult logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const Eigen::VectorXd& weight,
                             const Eigen::VectorXd& offset, Eigen::VectorXd init, const FitOptions& options,
                             double tol)
{
  LogisticResult out;
  out.coef = std::move(init);
  const Eigen::Index n = x.rows();

  Eigen::VectorXd eta = offset + x * out.coef;
  double ll = weighted_bernoulli_loglik(eta, target, weight);
  Eigen::VectorXd p(n);
  Eigen::VectorXd resid(n);
  Eigen::VectorXd w(n);

  for (int it = 0; it <= options.max_inner; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = expit(eta(i));
      resid(i) = weight(i) * (target(i) - p(i));
      w(i) = weight(i) * p(i) * (1.0 - p(i));
    }
    out.info = kernels::weighted_gram(x, w);
    const Eigen::VectorXd grad = kernels::cross(x, resid);
    if (grad.lpNorm<Eigen::Infinity>() <= tol || it == options.max_inner)
      break;

    Eigen::VectorXd step;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(out.info);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 0.0)
      step = ldlt.solve(grad);
    else
      step = out.info.completeOrthogonalDecomposition().solve(grad);

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      const Eigen::VectorXd cand = out.coef + t * step;
      const Eigen::VectorXd eta_c = offset + x * cand;
      const double ll_c = weighted_bernoulli_loglik(eta_c, target, weight);
      if (std::isfinite(ll_c) && ll_c >= ll - 1e-13 * (1.0 + std::abs(ll))) {
        out.coef = cand;
        eta = eta_c;
        ll = ll_c;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++out.iterations;
    if (!accepted)
      break;
    if (out.coef.size() > 0 && out.coef.lpNorm<Eigen::Infinity>() > options.separation_bound) {
      out.separated = true;
      break;
    }
    if ((t * step).lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + out.coef.lpNorm<Eigen::Infinity>()))
      break;
  }
  return out;
}

Eigen::MatrixXd covariance_from_info(const Eigen::MatrixXd& info, double& condition, bool& near_singular)
{
  if (info.size() == 0) {
    condition = 1.0;
    near_singular = false;
    return info;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  near_singular = !(condition <= kNearSingularCondition);
  if (!near_singular)
    return info.ldlt().solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
  return info.completeOrthogonalDecomposition().pseudoInverse();
}

}  // namespace zinfer::detail
