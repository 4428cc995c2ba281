#include "zinfer/score.hpp"

#include <cmath>

#include "zinfer/errors.hpp"
#include "zinfer/kernels.hpp"

namespace zinfer {

ScorePair score_obs(const ZiDerived& d, Count y)
{
  const double yd = static_cast<double>(y);
  const double indicator = y == 0 ? 1.0 : 0.0;
  const double weight = y == 0 ? d.psi : 1.0;
  return {weight * (yd - d.phi * d.mu), (indicator - d.pi0_tilde) * d.v};
}

ScorePair score_obs(const ZiModel& model, Count y)
{
  if (!model.base.in_support(y))
    throw DomainError("count " + std::to_string(y) + " outside the support of " + model.base.name());
  return score_obs(derived(model), y);
}

Eigen::Matrix2d expected_info(const ZiDerived& d)
{
  Eigen::Matrix2d h;
  const double cov = -d.rho * d.mu * d.pi0_tilde;
  h << d.rho * d.var + d.rho * (1.0 - d.rho) * d.mu * d.mu, cov, cov, d.pi0_tilde * (1.0 - d.pi0_tilde);
  Eigen::Matrix2d g;
  g << 1.0, -d.u * d.mu, 0.0, d.v;
  Eigen::Matrix2d f = g * h * g.transpose();
  f(1, 0) = f(0, 1);
  return f;
}

Eigen::Matrix2d expected_info(const ZiModel& model) { return expected_info(derived(model)); }

namespace {

Eigen::Matrix2d observed_info_tau(const ZiModel& model, Count y)
{
  const ZiDerived d = derived(model);
  const double one_m_pi0 = -std::expm1(d.log_pi0);
  const double indicator = y == 0 ? 1.0 : 0.0;
  const double bern_var = d.pi0_tilde * (1.0 - d.pi0_tilde);

  const double dgt_dtheta = -d.u * d.mu - d.mu / one_m_pi0;
  const double dpt_dtheta = bern_var * dgt_dtheta;
  const double dpt_dgamma = bern_var * d.v;
  const double drho_dtheta = (-dpt_dtheta - d.rho * d.mu * d.pi0) / one_m_pi0;
  const double drho_dgamma = -dpt_dgamma / one_m_pi0;
  const double du_dtheta = model.type.tau2() * d.mu * d.pi0 / (one_m_pi0 * one_m_pi0);

  const double h_tt = dpt_dtheta * d.u * d.mu - (indicator - d.pi0_tilde) * (du_dtheta * d.mu + d.u * d.var) -
                      drho_dtheta * d.mu - d.rho * d.var;
  const double h_tg = dpt_dgamma * d.u * d.mu - drho_dgamma * d.mu;
  const double h_gg = -dpt_dgamma * d.v;

  Eigen::Matrix2d info;
  info << -h_tt, -h_tg, -h_tg, -h_gg;
  return info;
}

Eigen::Matrix2d observed_info_numeric(const ZiModel& model, Count y)
{
  const double h_theta = 1e-5 * std::max(1.0, std::abs(model.theta));
  const double h_gamma = 1e-5 * std::max(1.0, std::abs(model.gamma));
  auto score_at = [&](double theta, double gamma) {
    ZiModel m = model;
    m.theta = theta;
    m.gamma = gamma;
    const ScorePair s = score_obs(derived(m), y);
    return Eigen::Vector2d(s.s_theta, s.s_gamma);
  };
  const Eigen::Vector2d dt =
      (score_at(model.theta + h_theta, model.gamma) - score_at(model.theta - h_theta, model.gamma)) / (2 * h_theta);
  const Eigen::Vector2d dg =
      (score_at(model.theta, model.gamma + h_gamma) - score_at(model.theta, model.gamma - h_gamma)) / (2 * h_gamma);
  Eigen::Matrix2d info;
  const double off = -0.5 * (dt(1) + dg(0));
  info << -dt(0), off, off, -dg(1);
  return info;
}

}  // namespace

Eigen::Matrix2d observed_info(const ZiModel& model, Count y)
{
  if (!model.base.in_support(y))
    throw DomainError("count " + std::to_string(y) + " outside the support of " + model.base.name());
  if (model.type.is_mixture())
    return observed_info_numeric(model, y);
  return observed_info_tau(model, y);
}

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& coef)
{
  if (x.cols() != coef.size())
    throw DomainError("coefficient vector length " + std::to_string(coef.size()) + " does not match " +
                      std::to_string(x.cols()) + " design columns");
  if (x.cols() == 0)
    return Eigen::VectorXd::Zero(x.rows());
  return x * coef;
}

namespace {

std::vector<kernels::ObsEval> evaluate_state(const FitState& state, const Dataset& data)
{
  const Eigen::VectorXd theta = linear_predictor(data.x_beta, state.beta);
  const Eigen::VectorXd gamma = linear_predictor(data.x_alpha, state.alpha);
  const kernels::Inputs in{state.base, state.type, data.q() == 0, theta, gamma, data.y};
  return kernels::evaluate(in);
}

}  // namespace

std::vector<ZiDerived> observation_terms(const FitState& state, const Dataset& data)
{
  const auto obs = evaluate_state(state, data);
  std::vector<ZiDerived> out;
  out.reserve(obs.size());
  for (const auto& o : obs)
    out.push_back(o.d);
  return out;
}

Eigen::VectorXd regression_score(const FitState& state, const Dataset& data)
{
  const auto obs = evaluate_state(state, data);
  return kernels::score(obs, data.x_beta, data.x_alpha);
}

RegressionInfo regression_expected_info(const FitState& state, const Dataset& data)
{
  const auto obs = evaluate_state(state, data);
  RegressionInfo out;
  out.matrix = kernels::info(obs, data.x_beta, data.x_alpha);
  if (out.matrix.size() == 0)
    return out;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.matrix, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  out.near_singular = !(out.condition <= kNearSingularCondition);
  return out;
}

double regression_loglik(const FitState& state, const Dataset& data)
{
  return kernels::loglik(evaluate_state(state, data));
}

namespace kernels {

ObsEval evaluate_one(const BaseCount& base, const ZiType& type, bool null_zi, double theta, double gamma, Count y)
{
  ObsEval e{};
  e.d = null_zi ? derived_null(base, theta) : derived(ZiModel{base, type, theta, gamma});
  const ScorePair s = score_obs(e.d, y);
  e.s_theta = s.s_theta;
  e.s_gamma = s.s_gamma;
  e.loglik = zi_log_pmf(e.d, base, theta, y);
  const Eigen::Matrix2d f = expected_info(e.d);
  e.f_tt = f(0, 0);
  e.f_tg = f(0, 1);
  e.f_gg = f(1, 1);
  return e;
}

}  // namespace kernels

}  // namespace zinfer
