#include "zinfer/kernels.hpp"

namespace zinfer::kernels::serial {

std::vector<ObsEval> evaluate(const Inputs& in)
{
  const std::size_t n = in.y.size();
  std::vector<ObsEval> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double gamma = in.null_zi ? 0.0 : in.gamma(row);
    out[i] = evaluate_one(in.base, in.type, in.null_zi, in.theta(row), gamma, in.y[i]);
  }
  return out;
}

Eigen::VectorXd score(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa)
{
  const Eigen::Index p = xb.cols();
  const Eigen::Index q = xa.cols();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p + q);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < p; ++j)
      g(j) += obs[i].s_theta * xb(r, j);
    for (Eigen::Index j = 0; j < q; ++j)
      g(p + j) += obs[i].s_gamma * xa(r, j);
  }
  return g;
}

Eigen::MatrixXd info(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa)
{
  const Eigen::Index p = xb.cols();
  const Eigen::Index q = xa.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + q, p + q);
  Eigen::VectorXd z(p + q);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const ObsEval& o = obs[i];
    // z^T F z with z = (x^beta, x^alpha) blocks
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = 0; b < p; ++b)
        m(a, b) += o.f_tt * xb(r, a) * xb(r, b);
      for (Eigen::Index b = 0; b < q; ++b) {
        const double t = o.f_tg * xb(r, a) * xa(r, b);
        m(a, p + b) += t;
        m(p + b, a) += t;
      }
    }
    for (Eigen::Index a = 0; a < q; ++a)
      for (Eigen::Index b = 0; b < q; ++b)
        m(p + a, p + b) += o.f_gg * xa(r, a) * xa(r, b);
  }
  return m;
}

double loglik(std::span<const ObsEval> obs)
{
  double total = 0.0;
  for (const auto& o : obs)
    total += o.loglik;
  return total;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w)
{
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index a = 0; a < p; ++a)
      for (Eigen::Index b = 0; b < p; ++b)
        m(a, b) += w(i) * x(i, a) * x(i, b);
  return m;
}

Eigen::VectorXd cross(const Eigen::MatrixXd& x, const Eigen::VectorXd& r)
{
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out(j) += x(i, j) * r(i);
  return out;
}

}  // namespace zinfer::kernels::serial
