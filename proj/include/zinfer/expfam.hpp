#pragma once

#include <cstdint>
#include <string>

#include "zinfer/numeric.hpp"

namespace zinfer {

using Count = std::int64_t;

/// Exponential-family count distribution in natural parameterisation:
/// log pi_y(theta) = theta * y - A(theta) + log h(y).
///
/// Poisson: theta = log(lambda), A = e^theta, h(y) = 1/y!.
/// Binomial(n): theta = logit(p), A = n log(1 + e^theta), h(y) = C(n, y).
class BaseCount {
 public:
  enum class Kind { Poisson, Binomial };

  static BaseCount poisson() { return BaseCount(Kind::Poisson, 0); }
  static BaseCount binomial(std::int64_t trials);

  /// Parses "poisson" or "binomial:<trials>".
  static BaseCount parse(const std::string& text);

  Kind kind() const { return kind_; }
  std::int64_t trials() const { return trials_; }
  std::string name() const;

  double cumulant(double theta) const;
  double mean(double theta) const;
  double variance(double theta) const;
  double log_pi0(double theta) const;
  double log_base_measure(Count y) const;

  bool in_support(Count y) const;
  /// Upper end of a summation range that carries all but a negligible tail of the mass.
  Count support_cutoff(double theta) const;

  friend bool operator==(const BaseCount&, const BaseCount&) = default;

 private:
  BaseCount(Kind kind, std::int64_t trials) : kind_(kind), trials_(trials) {}

  Kind kind_;
  std::int64_t trials_;
};

struct BaseMoments {
  double mean;
  double var;
  double pi0;
};

/// log pi_y(theta) including the base measure; throws DomainError outside the support.
double log_pmf(const BaseCount& base, double theta, Count y);

BaseMoments moments(const BaseCount& base, double theta);

/// One draw from pi_y(theta). Poisson uses sequential-search inversion for
/// lambda <= 30 and PTRS transformed rejection above; binomial uses inversion
/// searching outward from the mode.
Count sample(const BaseCount& base, double theta, Rng& rng);

inline constexpr std::int64_t kTruncatedSamplerCap = 1'000'000;

/// One draw from pi_y / (1 - pi0) on y >= 1, by rejecting zeros.
/// Throws SamplingError when pi0 >= 1 - 1e-12 or the expected number of
/// attempts 1/(1 - pi0) exceeds max_attempts.
Count sample_truncated_positive(const BaseCount& base, double theta, Rng& rng,
                                std::int64_t max_attempts = kTruncatedSamplerCap);

}  // namespace zinfer
