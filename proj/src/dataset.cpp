#include "zinfer/dataset.hpp"

#include <algorithm>
#include <cstring>

#include "zinfer/errors.hpp"

namespace zinfer {

std::size_t Dataset::n_zero() const
{
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), Count{0}));
}

void Dataset::validate(const BaseCount& base)
{
  const auto rows = static_cast<Eigen::Index>(y.size());
  if (x_beta.rows() != rows || x_alpha.rows() != rows)
    throw DomainError("design matrices must have one row per response");
  if (rows < x_beta.cols() + x_alpha.cols())
    throw DomainError("need at least p + q observations");
  if (!x_beta.allFinite() || !x_alpha.allFinite())
    throw DomainError("design matrices contain non-finite entries");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!base.in_support(y[i]))
      throw DomainError("response " + std::to_string(y[i]) + " at row " + std::to_string(i) +
                        " outside the support of " + base.name());
  }
  auto fill = [](std::vector<std::string>& names, Eigen::Index cols, const char* stem) {
    if (static_cast<Eigen::Index>(names.size()) == cols)
      return;
    if (!names.empty())
      throw DomainError("column name count does not match the design");
    for (Eigen::Index j = 0; j < cols; ++j)
      names.push_back(std::string(stem) + std::to_string(j));
  };
  fill(beta_names, x_beta.cols(), "beta");
  fill(alpha_names, x_alpha.cols(), "alpha");
}

std::uint64_t Dataset::fingerprint() const
{
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t dims[] = {y.size(), static_cast<std::uint64_t>(x_beta.cols()),
                                static_cast<std::uint64_t>(x_alpha.cols())};
  mix(dims, sizeof dims);
  mix(y.data(), y.size() * sizeof(Count));
  mix(x_beta.data(), static_cast<std::size_t>(x_beta.size()) * sizeof(double));
  mix(x_alpha.data(), static_cast<std::size_t>(x_alpha.size()) * sizeof(double));
  return h;
}

Dataset iid_dataset(std::vector<Count> y)
{
  Dataset d;
  const auto n = static_cast<Eigen::Index>(y.size());
  d.y = std::move(y);
  d.x_beta = Eigen::MatrixXd::Ones(n, 1);
  d.x_alpha = Eigen::MatrixXd::Ones(n, 1);
  d.beta_names = {"intercept"};
  d.alpha_names = {"intercept"};
  return d;
}

}  // namespace zinfer
