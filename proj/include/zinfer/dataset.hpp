#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zinfer/expfam.hpp"

namespace zinfer {

/// Response counts with one design matrix for the location side (beta) and
/// one for the zero-inflation side (alpha). The two may share columns.
struct Dataset {
  std::vector<Count> y;
  Eigen::MatrixXd x_beta;
  Eigen::MatrixXd x_alpha;
  std::vector<std::string> beta_names;
  std::vector<std::string> alpha_names;

  std::size_t n() const { return y.size(); }
  std::size_t n_zero() const;
  Eigen::Index p() const { return x_beta.cols(); }
  Eigen::Index q() const { return x_alpha.cols(); }

  /// Throws DomainError unless shapes agree, n >= p + q, every y is in the
  /// base support and both designs are finite. Missing names are filled in.
  void validate(const BaseCount& base);

  /// FNV-1a hash over y and both designs; identifies "the same data".
  std::uint64_t fingerprint() const;
};

/// Intercept-only designs on both sides.
Dataset iid_dataset(std::vector<Count> y);

}  // namespace zinfer
