#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace zinfer {

/// Logits beyond this magnitude saturate: expit(36.7) rounds to 1 - 1e-16.
inline constexpr double kLogitClamp = 36.7;

inline double clamp_logit(double x) { return std::clamp(x, -kLogitClamp, kLogitClamp); }

/// log(1 + e^x) without overflow.
inline double softplus(double x)
{
  if (x > 0.0)
    return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double expit(double x)
{
  x = clamp_logit(x);
  if (x >= 0.0)
    return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p)
{
  return clamp_logit(std::log(p) - std::log1p(-p));
}

/// log(1 - e^x) for x < 0 (Maechler's split at -log 2).
inline double log1mexp(double x)
{
  if (x > -0.6931471805599453)
    return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// log(e^a + e^b).
inline double logaddexp(double a, double b)
{
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == -std::numeric_limits<double>::infinity())
    return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_choose(std::int64_t n, std::int64_t k)
{
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

using Rng = std::mt19937_64;

/// Uniform on the open interval (0, 1) from the top 53 bits; platform independent,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng)
{
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace zinfer
