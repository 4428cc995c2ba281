#include "zinfer/zicore.hpp"

#include <cmath>
#include <limits>

#include "zinfer/errors.hpp"

namespace zinfer {

namespace {

const double kMaxInflatedLogit = std::log(kMaxInflatedZero) - std::log1p(-kMaxInflatedZero);

ZiDerived assemble(const BaseCount& base, double theta, const LogPi0& lp, double omega, double u, double v,
                   double slope)
{
  ZiDerived d{};
  d.log_pi0 = lp.log_p0;
  d.pi0 = std::exp(lp.log_p0);
  d.logit_pi0 = lp.logit();
  d.omega = omega;
  d.u = u;
  d.v = v;
  d.mu = base.mean(theta);
  d.var = base.variance(theta);

  d.logit_pi0_tilde = omega + d.logit_pi0;
  if (!(d.logit_pi0_tilde < kMaxInflatedLogit))
    throw InflationOverflow("theta=" + std::to_string(theta) + ", omega=" + std::to_string(omega));
  d.pi0_tilde = expit(d.logit_pi0_tilde);
  d.kappa = std::expm1(omega);

  // rho^-1 = 1 + kappa pi0 = (1 - pi0) + e^omega pi0
  const double kp = d.kappa * d.pi0;
  if (omega < 30.0 && kp > -0.5)
    d.log_rho = -std::log1p(kp);
  else
    d.log_rho = -logaddexp(lp.log_1mp0, omega + lp.log_p0);
  d.rho = std::exp(d.log_rho);

  d.phi = d.rho - u * d.pi0_tilde;
  // u + phi = rho * d logit(pi0~)/d logit(pi0); exact zero for the hurdle.
  d.psi = d.rho * slope / d.phi;
  return d;
}

}  // namespace

ZiDerived derived(const ZiModel& model)
{
  if (!std::isfinite(model.theta) || !std::isfinite(model.gamma))
    throw DomainError("theta and gamma must be finite");
  const LogPi0 lp = LogPi0::from_log(model.base.log_pi0(model.theta));
  const OmegaDerivs od = model.type.derivs(model.gamma, lp);
  return assemble(model.base, model.theta, lp, od.omega, od.u, od.v, model.type.logit_slope(model.gamma, lp));
}

ZiDerived derived_null(const BaseCount& base, double theta)
{
  if (!std::isfinite(theta))
    throw DomainError("theta must be finite");
  const LogPi0 lp = LogPi0::from_log(base.log_pi0(theta));
  return assemble(base, theta, lp, 0.0, 0.0, 0.0, 1.0);
}

double zi_log_pmf(const ZiDerived& d, const BaseCount& base, double theta, Count y)
{
  if (!base.in_support(y))
    throw DomainError("count " + std::to_string(y) + " outside the support of " + base.name());
  if (y == 0) {
    if (std::abs(d.omega) < 30.0)
      return d.omega + d.log_rho + d.log_pi0;
    return -softplus(-d.logit_pi0_tilde);
  }
  return d.log_rho + log_pmf(base, theta, y);
}

double zi_log_pmf(const ZiModel& model, Count y)
{
  return zi_log_pmf(derived(model), model.base, model.theta, y);
}

ZiMoments zi_moments(const ZiModel& model)
{
  const ZiDerived d = derived(model);
  return {d.rho * d.mu, d.rho * d.var + d.rho * (1.0 - d.rho) * d.mu * d.mu};
}

Count simulate_one(const ZiModel& model, const ZiDerived& d, Rng& rng)
{
  if (uniform01(rng) <= d.pi0_tilde)
    return 0;
  return sample_truncated_positive(model.base, model.theta, rng);
}

std::vector<Count> simulate(const ZiModel& model, std::size_t n, Rng& rng)
{
  const ZiDerived d = derived(model);
  std::vector<Count> out(n);
  for (auto& y : out)
    y = simulate_one(model, d, rng);
  return out;
}

LatentM::LatentM(double kappa) : kappa_(kappa)
{
  if (!(kappa > -1.0))
    throw DomainError("kappa must exceed -1");
  if (kappa > 0.0)
    kind_ = Kind::Binary;
  else if (kappa < 0.0)
    kind_ = Kind::Geometric;
  else
    kind_ = Kind::PointMass;
}

double LatentM::pmf(std::int64_t m) const
{
  switch (kind_) {
    case Kind::PointMass:
      return m == 1 ? 1.0 : 0.0;
    case Kind::Binary:
      if (m == 1)
        return 1.0 / (1.0 + kappa_);
      if (m == 0)
        return kappa_ / (1.0 + kappa_);
      return 0.0;
    case Kind::Geometric:
      if (m < 1)
        return 0.0;
      return (1.0 + kappa_) * std::pow(-kappa_, static_cast<double>(m - 1));
  }
  return 0.0;
}

double LatentM::variance() const
{
  return std::abs(kappa_) / ((1.0 + kappa_) * (1.0 + kappa_));
}

LatentM latent_m_distribution(const ZiModel& model) { return LatentM(derived(model).kappa); }

}  // namespace zinfer
