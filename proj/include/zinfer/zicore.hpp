#pragma once

#include <cstdint>
#include <vector>

#include "zinfer/expfam.hpp"
#include "zinfer/zitype.hpp"

namespace zinfer {

/// A single zero-inflated count distribution: base pi_y(theta) with the zero
/// log-odds shifted by omega(gamma, pi0(theta)).
struct ZiModel {
  BaseCount base;
  ZiType type;
  double theta;
  double gamma;
};

/// Every quantity the score equations need at one (theta, gamma).
struct ZiDerived {
  double pi0;
  double omega;
  double kappa;      ///< e^omega - 1
  double rho;        ///< (1 - pi0~) / (1 - pi0)
  double pi0_tilde;
  double u;
  double v;
  double phi;        ///< rho - u pi0~
  double psi;        ///< 1 + u / phi, the weight on observed zeros

  double log_pi0;
  double log_rho;
  double logit_pi0;
  double logit_pi0_tilde;
  double mu;         ///< A'(theta)
  double var;        ///< A''(theta)
};

/// pi0~ at or above this is rejected as an inflation overflow.
inline constexpr double kMaxInflatedZero = 1.0 - 1e-12;

ZiDerived derived(const ZiModel& model);

/// The same quantities with omega forced to zero (no inflation), for designs
/// without any zero-inflation covariates.
ZiDerived derived_null(const BaseCount& base, double theta);

/// omega 1{y=0} + log rho + log pi_y(theta).
double zi_log_pmf(const ZiModel& model, Count y);
double zi_log_pmf(const ZiDerived& d, const BaseCount& base, double theta, Count y);

struct ZiMoments {
  double mean;
  double var;
};

/// mean = rho mu; var = rho Var[Y] + rho (1 - rho) mu^2.
ZiMoments zi_moments(const ZiModel& model);

/// Draw y~: zero when U <= pi0~, otherwise a zero-truncated base draw.
Count simulate_one(const ZiModel& model, const ZiDerived& d, Rng& rng);
std::vector<Count> simulate(const ZiModel& model, std::size_t n, Rng& rng);

/// Number M of latent base zeros behind one observed zero.
///   kappa > 0: M in {0, 1}, P(M = 1) = 1 / (1 + kappa)
///   kappa < 0: geometric on m >= 1, P(M = m) = (1 + kappa)(-kappa)^(m - 1)
///   kappa = 0: M = 1
class LatentM {
 public:
  enum class Kind { PointMass, Binary, Geometric };

  explicit LatentM(double kappa);

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  double pmf(std::int64_t m) const;
  double mean() const { return 1.0 / (1.0 + kappa_); }
  double variance() const;

 private:
  double kappa_;
  Kind kind_;
};

LatentM latent_m_distribution(const ZiModel& model);

}  // namespace zinfer
