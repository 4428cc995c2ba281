#pragma once

// Regression data simulated from known coefficients, shared by the fit,
// model-selection and acceptance tests.

#include <cmath>
#include <numbers>

#include "zinfer/dataset.hpp"
#include "zinfer/numeric.hpp"
#include "zinfer/zicore.hpp"

namespace simdata {

inline double normal(zinfer::Rng& rng)
{
  const double u1 = 1.0 - zinfer::uniform01(rng);
  const double u2 = zinfer::uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Design [1, x] with x ~ N(0, x_sd^2) on the location side; the degree side
/// is intercept-only, or [1, x] when alpha has two entries.
inline zinfer::Dataset regression(const zinfer::BaseCount& base, const zinfer::ZiType& type, Eigen::Index n,
                                  const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha, std::uint64_t seed,
                                  double x_sd = 1.0)
{
  zinfer::Rng rng(seed);
  zinfer::Dataset d;
  d.x_beta.resize(n, beta.size());
  d.x_alpha.resize(n, alpha.size());
  d.y.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = x_sd * normal(rng);
    d.x_beta(i, 0) = 1.0;
    if (beta.size() > 1)
      d.x_beta(i, 1) = x;
    if (alpha.size() > 0)
      d.x_alpha(i, 0) = 1.0;
    if (alpha.size() > 1)
      d.x_alpha(i, 1) = x;
    const double theta = d.x_beta.row(i).dot(beta);
    const double gamma = alpha.size() > 0 ? d.x_alpha.row(i).dot(alpha) : 0.0;
    const zinfer::ZiModel m{base, type, theta, gamma};
    const zinfer::ZiDerived zd = alpha.size() > 0 ? zinfer::derived(m) : zinfer::derived_null(base, theta);
    d.y.push_back(zinfer::simulate_one(m, zd, rng));
  }
  d.validate(base);
  return d;
}

}  // namespace simdata
