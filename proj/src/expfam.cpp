#include "zinfer/expfam.hpp"

#include <charconv>
#include <cmath>

#include "zinfer/errors.hpp"

namespace zinfer {

BaseCount BaseCount::binomial(std::int64_t trials)
{
  if (trials < 1)
    throw DomainError("binomial trials must be >= 1, got " + std::to_string(trials));
  return BaseCount(Kind::Binomial, trials);
}

BaseCount BaseCount::parse(const std::string& text)
{
  if (text == "poisson")
    return poisson();
  const std::string prefix = "binomial:";
  if (text.rfind(prefix, 0) == 0) {
    std::int64_t trials = 0;
    const char* first = text.data() + prefix.size();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, trials);
    if (ec != std::errc() || ptr != last)
      throw DomainError("bad binomial trials in '" + text + "'");
    return binomial(trials);
  }
  throw DomainError("unknown base distribution '" + text + "' (expected poisson or binomial:<trials>)");
}

std::string BaseCount::name() const
{
  if (kind_ == Kind::Poisson)
    return "poisson";
  return "binomial:" + std::to_string(trials_);
}

double BaseCount::cumulant(double theta) const
{
  if (kind_ == Kind::Poisson)
    return std::exp(theta);
  return static_cast<double>(trials_) * softplus(theta);
}

double BaseCount::mean(double theta) const
{
  if (kind_ == Kind::Poisson)
    return std::exp(theta);
  // expit without the logit clamp: the mean must stay strictly inside (0, n).
  const double p = theta >= 0 ? 1.0 / (1.0 + std::exp(-theta)) : std::exp(theta) / (1.0 + std::exp(theta));
  return static_cast<double>(trials_) * p;
}

double BaseCount::variance(double theta) const
{
  if (kind_ == Kind::Poisson)
    return std::exp(theta);
  const double e = std::exp(-std::abs(theta));
  return static_cast<double>(trials_) * e / ((1.0 + e) * (1.0 + e));
}

double BaseCount::log_pi0(double theta) const
{
  if (kind_ == Kind::Poisson)
    return -std::exp(theta);
  return -static_cast<double>(trials_) * softplus(theta);
}

double BaseCount::log_base_measure(Count y) const
{
  if (kind_ == Kind::Poisson)
    return -std::lgamma(static_cast<double>(y) + 1.0);
  return log_choose(trials_, y);
}

bool BaseCount::in_support(Count y) const
{
  if (y < 0)
    return false;
  return kind_ == Kind::Poisson || y <= trials_;
}

Count BaseCount::support_cutoff(double theta) const
{
  if (kind_ == Kind::Binomial)
    return trials_;
  const double lambda = std::exp(theta);
  return static_cast<Count>(std::ceil(lambda + 20.0 * std::sqrt(lambda) + 40.0));
}

double log_pmf(const BaseCount& base, double theta, Count y)
{
  if (!base.in_support(y))
    throw DomainError("count " + std::to_string(y) + " outside the support of " + base.name());
  return theta * static_cast<double>(y) - base.cumulant(theta) + base.log_base_measure(y);
}

BaseMoments moments(const BaseCount& base, double theta)
{
  return {base.mean(theta), base.variance(theta), std::exp(base.log_pi0(theta))};
}

namespace {

Count poisson_inversion(double lambda, Rng& rng)
{
  double u = uniform01(rng);
  double p = std::exp(-lambda);
  Count k = 0;
  // Cap the walk far beyond any mass that double precision can resolve.
  const Count limit = static_cast<Count>(lambda + 60.0 * std::sqrt(lambda) + 100.0);
  while (u > p && k < limit) {
    u -= p;
    ++k;
    p *= lambda / static_cast<double>(k);
  }
  return k;
}

// Hormann (1993), transformed rejection with squeeze.
Count poisson_ptrs(double lambda, Rng& rng)
{
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr)
      return static_cast<Count>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us))
      continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lambda + kd * loglam - std::lgamma(kd + 1.0))
      return static_cast<Count>(kd);
  }
}

// Inversion that visits the support in the order mode, mode-1, mode+1, ...
// so the walk length is O(sd) and no tail probability underflows first.
Count binomial_mode_inversion(std::int64_t n, double theta, Rng& rng)
{
  const double p = std::exp(theta - softplus(theta));
  const double odds = std::exp(clamp_logit(theta));
  Count mode = static_cast<Count>(std::floor((static_cast<double>(n) + 1.0) * p));
  mode = std::clamp<Count>(mode, 0, n);

  const double pmode = std::exp(theta * static_cast<double>(mode) - static_cast<double>(n) * softplus(theta) +
                                log_choose(n, mode));
  double u = uniform01(rng) - pmode;
  if (u <= 0.0)
    return mode;

  Count lo = mode;
  Count hi = mode;
  double plo = pmode;
  double phi = pmode;
  while (lo > 0 || hi < n) {
    if (lo > 0) {
      plo *= static_cast<double>(lo) / (static_cast<double>(n - lo + 1) * odds);
      --lo;
      u -= plo;
      if (u <= 0.0)
        return lo;
    }
    if (hi < n) {
      phi *= static_cast<double>(n - hi) * odds / static_cast<double>(hi + 1);
      ++hi;
      u -= phi;
      if (u <= 0.0)
        return hi;
    }
  }
  return mode;
}

}  // namespace

Count sample(const BaseCount& base, double theta, Rng& rng)
{
  if (base.kind() == BaseCount::Kind::Poisson) {
    const double lambda = std::exp(theta);
    return lambda <= 30.0 ? poisson_inversion(lambda, rng) : poisson_ptrs(lambda, rng);
  }
  return binomial_mode_inversion(base.trials(), theta, rng);
}

Count sample_truncated_positive(const BaseCount& base, double theta, Rng& rng, std::int64_t max_attempts)
{
  const double log_p0 = base.log_pi0(theta);
  const double p_positive = -std::expm1(log_p0);
  if (!(p_positive > 1e-12) || 1.0 / p_positive > static_cast<double>(max_attempts))
    throw SamplingError("truncated sampler: zero probability too close to 1 (P(y>0) = " +
                        std::to_string(p_positive) + ")");
  for (std::int64_t attempt = 0; attempt < max_attempts; ++attempt) {
    const Count y = sample(base, theta, rng);
    if (y > 0)
      return y;
  }
  throw SamplingError("truncated sampler: no positive draw within " + std::to_string(max_attempts) +
                      " attempts");
}

}  // namespace zinfer
