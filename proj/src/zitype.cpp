#include "zinfer/zitype.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "zinfer/errors.hpp"
#include "zinfer/numeric.hpp"

namespace zinfer {

namespace {

// Unclamped logistic; u for the mixture needs full resolution near 1.
double logistic(double x)
{
  const double e = std::exp(-std::abs(x));
  return x >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

constexpr double kSlopeTolerance = 1e-12;

// logit(pi0) grid from -30 to 30 covers pi0 in roughly (1e-13, 1 - 1e-13).
template <typename F>
bool slope_nonnegative_on_grid(F&& slope)
{
  constexpr int kPoints = 601;
  for (int i = 0; i < kPoints; ++i) {
    const double g = -30.0 + 60.0 * i / (kPoints - 1);
    const double pi0 = logistic(g);
    if (slope(pi0) < -kSlopeTolerance)
      return false;
  }
  return true;
}

bool close(double a, double b) { return std::abs(a - b) < 1e-15; }

std::string format_tau(double t)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", t);
  return buf;
}

}  // namespace

LogPi0 LogPi0::from_log(double log_p0) { return {log_p0, log1mexp(log_p0)}; }

LogPi0 LogPi0::from_prob(double pi0)
{
  if (!(pi0 > 0.0 && pi0 < 1.0))
    throw DomainError("pi0 must lie in (0, 1), got " + std::to_string(pi0));
  return {std::log(pi0), std::log1p(-pi0)};
}

double LogPi0::pi0() const { return std::exp(log_p0); }

ZiType::ZiType(Form form, double tau1, double tau2) : form_(form), tau1_(tau1), tau2_(tau2), monotone_(true)
{
  if (form_ == Form::TauFamily) {
    monotone_ = slope_nonnegative_on_grid([&](double pi0) { return (1.0 + tau1_) - (tau1_ + tau2_) * pi0; });
  }
}

ZiType ZiType::mixture() { return ZiType(Form::Mixture, 0.0, 0.0); }

ZiType ZiType::tau_family(double tau1, double tau2)
{
  if (!std::isfinite(tau1) || !std::isfinite(tau2))
    throw DomainError("tau coefficients must be finite");
  return ZiType(Form::TauFamily, tau1, tau2);
}

ZiType ZiType::parse(const std::string& text)
{
  if (text == "multiplicative")
    return multiplicative();
  if (text == "additive")
    return additive();
  if (text == "hurdle")
    return hurdle();
  if (text == "mixture")
    return mixture();
  const std::string prefix = "custom:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string body = text.substr(prefix.size());
    const auto comma = body.find(',');
    if (comma == std::string::npos)
      throw DomainError("custom type needs two coefficients: custom:<tau1>,<tau2>");
    auto parse_one = [&](const std::string& s) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw DomainError("bad tau coefficient '" + s + "'");
      return value;
    };
    return tau_family(parse_one(body.substr(0, comma)), parse_one(body.substr(comma + 1)));
  }
  throw DomainError("unknown zero-inflation type '" + text + "'");
}

std::string ZiType::name() const
{
  if (form_ == Form::Mixture)
    return "mixture";
  if (close(tau1_, 0.0) && close(tau2_, 0.0))
    return "multiplicative";
  if (close(tau1_, -1.0) && close(tau2_, 0.0))
    return "additive";
  if (close(tau1_, -1.0) && close(tau2_, 1.0))
    return "hurdle";
  return "custom:" + format_tau(tau1_) + "," + format_tau(tau2_);
}

double ZiType::omega(double gamma, const LogPi0& lp) const
{
  if (form_ == Form::Mixture)
    return softplus(-gamma - lp.log_p0);
  double w = gamma;
  if (tau1_ != 0.0)
    w += tau1_ * lp.log_p0;
  if (tau2_ != 0.0)
    w += tau2_ * lp.log_1mp0;
  return w;
}

OmegaDerivs ZiType::derivs(double gamma, const LogPi0& lp) const
{
  if (form_ == Form::Mixture) {
    // u = v = -e^-gamma / (pi0 + e^-gamma)
    const double u = -logistic(-gamma - lp.log_p0);
    return {omega(gamma, lp), u, u};
  }
  const double odds0 = std::exp(lp.log_p0 - lp.log_1mp0);
  const double u = tau2_ == 0.0 ? tau1_ : tau1_ - tau2_ * odds0;
  return {omega(gamma, lp), u, 1.0};
}

double ZiType::logit_slope(double gamma, const LogPi0& lp) const
{
  if (form_ == Form::Mixture) {
    // pi0 (1 + e^-gamma) / (pi0 + e^-gamma)
    return std::exp(lp.log_p0 + softplus(-gamma) - logaddexp(lp.log_p0, -gamma));
  }
  return (1.0 + tau1_) - (tau1_ + tau2_) * std::exp(lp.log_p0);
}

double ZiType::gamma_from_omega(double omega_value, const LogPi0& lp) const
{
  if (form_ == Form::Mixture) {
    const double kappa = std::expm1(omega_value);
    if (!(kappa > 0.0))
      throw DomainError("mixture type cannot represent zero deflation (omega <= 0)");
    return -(lp.log_p0 + std::log(kappa));
  }
  return omega_value - tau1_ * lp.log_p0 - tau2_ * lp.log_1mp0;
}

OmegaDerivs omega_and_derivs(const ZiType& type, double gamma, double pi0)
{
  if (!std::isfinite(gamma))
    throw DomainError("gamma must be finite");
  return type.derivs(gamma, LogPi0::from_prob(pi0));
}

bool is_monotone(const std::function<double(double)>& omega_of_pi0)
{
  // Compare logit(pi0~) at neighbouring grid points in logit(pi0).
  constexpr int kPoints = 2001;
  double prev = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double g = -30.0 + 60.0 * i / (kPoints - 1);
    const double gt = omega_of_pi0(logistic(g)) + g;
    if (i > 0 && gt < prev - 1e-12 * std::max(1.0, std::abs(prev)))
      return false;
    prev = gt;
  }
  return true;
}

}  // namespace zinfer
