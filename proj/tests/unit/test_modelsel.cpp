#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "simdata.hpp"
#include "zinfer/errors.hpp"
#include "zinfer/modelsel.hpp"

using Catch::Matchers::WithinAbs;
using namespace zinfer;

namespace {

FitResult fixed_fit(const ZiType& t, double theta, double gamma, const Dataset& d)
{
  FitResult f;
  f.type = t;
  f.beta = Eigen::VectorXd::Constant(1, theta);
  f.alpha = Eigen::VectorXd::Constant(1, gamma);
  f.n = d.n();
  f.n0 = d.n_zero();
  f.data_fingerprint = d.fingerprint();
  f.converged = true;
  return f;
}

}  // namespace

TEST_CASE("log_likelihood worked values", "[modelsel]")
{
  const Dataset two = iid_dataset({0, 0});
  const FitResult f = fixed_fit(ZiType::multiplicative(), 0.0, std::log(2.0), two);
  CHECK_THAT(log_likelihood(f, two), WithinAbs(2 * -0.620114, 2e-6));

  // omega = 0 reduces to the Poisson log-likelihood
  const Dataset d = iid_dataset({0, 3, 1, 4, 0, 2});
  const FitResult g = fixed_fit(ZiType::multiplicative(), 0.4, 0.0, d);
  const oracle::Base ob{};
  double expect = 0.0;
  for (Count y : d.y)
    expect += std::log(ob.pmf(0.4, y));
  CHECK_THAT(log_likelihood(g, d), WithinAbs(expect, 1e-12));
}

TEST_CASE("compare: AIC/BIC arithmetic and ordering", "[modelsel]")
{
  const BaseCount pois = BaseCount::poisson();
  const Dataset d = simdata::regression(pois, ZiType::hurdle(), 600, Eigen::Vector2d(0.5, 0.6),
                                        Eigen::VectorXd::Constant(1, 0.3), 5);
  std::vector<FitResult> fits;
  for (const ZiType& t : {ZiType::multiplicative(), ZiType::additive(), ZiType::hurdle()})
    fits.push_back(fit_joint(d, pois, t));
  fits.push_back(fit_joint_estimate_tau(d, pois));

  const std::vector<ComparisonRow> rows = compare(fits, d);
  REQUIRE(rows.size() == 4);
  std::vector<int> ranks;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRow& r = rows[i];
    CHECK(r.aic == -2.0 * r.loglik + 2.0 * static_cast<double>(r.k));
    CHECK(r.bic == -2.0 * r.loglik + static_cast<double>(r.k) * std::log(static_cast<double>(d.n())));
    if (i > 0)
      CHECK(rows[i - 1].aic <= r.aic);
    ranks.push_back(r.rank);
    CHECK(r.k == (r.tau_estimated ? 5 : 3));
  }
  std::sort(ranks.begin(), ranks.end());
  CHECK(ranks == std::vector<int>{1, 2, 3, 4});

  for (const FitResult& f : fits)
    CHECK_THAT(log_likelihood(f, d), WithinAbs(f.loglik, 1e-12 * std::abs(f.loglik)));

  const auto est = std::find_if(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.tau_estimated; });
  REQUIRE(est != rows.end());
  CHECK(est->type_name == "estimate-tau");
}

TEST_CASE("compare: ties are broken deterministically", "[modelsel]")
{
  const Dataset d = iid_dataset({0, 0, 0, 0, 1, 2, 1, 3, 1, 2});
  const FitResult m = fit_iid(BaseCount::poisson(), ZiType::multiplicative(), d.y);
  const FitResult h = fit_iid(BaseCount::poisson(), ZiType::hurdle(), d.y);
  // iid fits of every type share the maximum, so all AICs tie
  const std::vector<ComparisonRow> a = compare({m, h, m}, d);
  const std::vector<ComparisonRow> b = compare({h, m, m}, d);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].type_name == b[i].type_name);
    CHECK(a[i].rank == static_cast<int>(i) + 1);
  }
  CHECK(a[0].type_name == "hurdle");
}

TEST_CASE("compare: fits on different data are refused", "[modelsel]")
{
  const Dataset d1 = iid_dataset({0, 1, 2, 0, 3});
  const Dataset d2 = iid_dataset({0, 1, 2, 0, 4});
  const FitResult a = fit_iid(BaseCount::poisson(), ZiType::multiplicative(), d1.y);
  const FitResult b = fit_iid(BaseCount::poisson(), ZiType::multiplicative(), d2.y);
  CHECK_THROWS_AS(compare({a, b}, d1), DomainError);
}

TEST_CASE("compare: multiplicative data favour the multiplicative type", "[modelsel][simulation]")
{
  const BaseCount pois = BaseCount::poisson();
  int wins = 0;
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    const Dataset d = simdata::regression(pois, ZiType::multiplicative(), 1000, Eigen::Vector2d(0.0, 1.0),
                                          Eigen::VectorXd::Constant(1, 0.5), 1000 + static_cast<std::uint64_t>(rep), 1.2);
    const std::vector<ComparisonRow> rows =
        compare({fit_joint(d, pois, ZiType::multiplicative()), fit_joint(d, pois, ZiType::hurdle())}, d);
    wins += rows[0].type_name == "multiplicative" ? 1 : 0;
  }
  INFO("multiplicative first in " << wins << " of " << reps);
  CHECK(wins >= 90);
}

TEST_CASE("diagnostic pairs", "[modelsel]")
{
  const BaseCount pois = BaseCount::poisson();
  const Dataset d = simdata::regression(pois, ZiType::multiplicative(), 400, Eigen::Vector2d(0.3, 0.7),
                                        Eigen::VectorXd::Constant(1, 0.5), 17);

  auto spread = [](const std::vector<DiagnosticRow>& rows, auto value) {
    double lo = INFINITY, hi = -INFINITY;
    for (const DiagnosticRow& r : rows) {
      lo = std::min(lo, value(r));
      hi = std::max(hi, value(r));
    }
    return hi - lo;
  };

  for (const ZiType& t : {ZiType::multiplicative(), ZiType::additive(), ZiType::hurdle(), ZiType::mixture()}) {
    const FitResult f = fit_joint(d, pois, t);
    const std::vector<DiagnosticRow> rows = diagnostics_pairs(f, d);
    INFO(t.name());
    REQUIRE(rows.size() == d.n());
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const DiagnosticRow& r = rows[i];
      if (i > 0)
        CHECK(rows[i - 1].pi0 <= r.pi0);
      CHECK_THAT(r.logit_pi0_tilde, WithinAbs(r.omega + r.logit_pi0, 1e-12 * std::max(1.0, std::abs(r.logit_pi0))));
      CHECK_THAT(r.logit_pi0, WithinAbs(oracle::logit(r.pi0), 1e-9));
      seen.push_back(r.index);
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());

    if (t == ZiType::multiplicative())
      CHECK(spread(rows, [](const DiagnosticRow& r) { return r.logit_pi0_tilde - r.logit_pi0; }) <= 1e-10);
    if (t == ZiType::hurdle())
      CHECK(spread(rows, [](const DiagnosticRow& r) { return r.pi0_tilde; }) <= 1e-10);
    if (t == ZiType::additive())
      CHECK(spread(rows, [](const DiagnosticRow& r) { return r.logit_pi0_tilde + std::log1p(-r.pi0); }) <= 1e-10);
  }
}
