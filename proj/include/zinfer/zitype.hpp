#pragma once

#include <functional>
#include <string>

namespace zinfer {

/// log(pi0) and log(1 - pi0), carried together so extreme theta stays finite.
struct LogPi0 {
  double log_p0;
  double log_1mp0;

  static LogPi0 from_log(double log_p0);
  static LogPi0 from_prob(double pi0);
  double pi0() const;
  double logit() const { return log_p0 - log_1mp0; }
};

struct OmegaDerivs {
  double omega;
  double u;  ///< pi0 * d omega / d pi0
  double v;  ///< d omega / d gamma
};

/// How the zero log-odds gap omega = logit(pi0~) - logit(pi0) depends on the
/// degree parameter gamma and on pi0.
///
/// Tau family: omega = gamma + tau1 log(pi0) + tau2 log(1 - pi0).
/// Mixture:    omega = log(pi0 + e^-gamma) - log(pi0).
class ZiType {
 public:
  enum class Form { TauFamily, Mixture };

  static ZiType multiplicative() { return tau_family(0.0, 0.0); }
  static ZiType additive() { return tau_family(-1.0, 0.0); }
  static ZiType hurdle() { return tau_family(-1.0, 1.0); }
  static ZiType mixture();
  static ZiType tau_family(double tau1, double tau2);

  /// Accepts multiplicative | additive | hurdle | mixture | custom:<tau1>,<tau2>.
  static ZiType parse(const std::string& text);

  Form form() const { return form_; }
  bool is_mixture() const { return form_ == Form::Mixture; }
  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }

  /// True when logit(pi0~) is non-decreasing in logit(pi0) over the whole
  /// admissible pi0 range; fixed at construction.
  bool monotone() const { return monotone_; }

  /// Preset name when the coefficients match one, otherwise "custom:<tau1>,<tau2>".
  std::string name() const;

  double omega(double gamma, const LogPi0& lp) const;
  OmegaDerivs derivs(double gamma, const LogPi0& lp) const;

  /// d logit(pi0~) / d logit(pi0) = 1 + (1 - pi0) u.
  double logit_slope(double gamma, const LogPi0& lp) const;

  /// Inverts omega(gamma, pi0) for gamma. Throws DomainError when the type
  /// cannot reach omega at this pi0 (mixture needs omega > 0).
  double gamma_from_omega(double omega, const LogPi0& lp) const;

  friend bool operator==(const ZiType&, const ZiType&) = default;

 private:
  ZiType(Form form, double tau1, double tau2);

  Form form_;
  double tau1_;
  double tau2_;
  bool monotone_;
};

/// omega, u = pi0 d omega/d pi0, v = d omega/d gamma. Throws DomainError for pi0 outside (0, 1).
OmegaDerivs omega_and_derivs(const ZiType& type, double gamma, double pi0);

/// Grid check that logit(pi0~) = omega(pi0) + logit(pi0) never decreases in
/// logit(pi0) for an arbitrary omega(pi0) at fixed degree.
bool is_monotone(const std::function<double(double)>& omega_of_pi0);

}  // namespace zinfer
