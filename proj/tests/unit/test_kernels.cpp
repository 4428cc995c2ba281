#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "zinfer/kernels.hpp"
#include "zinfer/numeric.hpp"

using namespace zinfer;
namespace k = zinfer::kernels;

namespace {

struct Problem {
  Eigen::MatrixXd xb, xa;
  Eigen::VectorXd theta, gamma, w;
  std::vector<Count> y;
};

// n is deliberately not a multiple of the block size.
Problem make_problem(Eigen::Index n, std::uint64_t seed)
{
  Rng rng(seed);
  Problem p;
  p.xb.resize(n, 3);
  p.xa.resize(n, 2);
  p.theta.resize(n);
  p.gamma.resize(n);
  p.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = uniform01(rng), b = uniform01(rng);
    p.xb.row(i) << 1.0, a, b;
    p.xa.row(i) << 1.0, b;
    p.theta(i) = -0.5 + 1.5 * a;
    p.gamma(i) = -1.0 + 2.0 * b;
    p.w(i) = 0.1 + uniform01(rng);
    p.y.push_back(static_cast<Count>(std::floor(5.0 * uniform01(rng) * uniform01(rng))));
  }
  return p;
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(1.0, b.lpNorm<Eigen::Infinity>());
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference", "[kernels]")
{
  const Problem p = make_problem(3 * k::kBlockRows + 77, 3);
  for (const ZiType& t : {ZiType::multiplicative(), ZiType::hurdle(), ZiType::mixture()}) {
    for (bool null_zi : {false, true}) {
      const BaseCount base = BaseCount::poisson();
      const k::Inputs in{base, t, null_zi, p.theta, p.gamma, p.y};
      const std::vector<k::ObsEval> s = k::serial::evaluate(in);
      const std::vector<k::ObsEval> o = k::omp::evaluate(in);
      REQUIRE(s.size() == o.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].s_theta == o[i].s_theta);
        CHECK(s[i].s_gamma == o[i].s_gamma);
        CHECK(s[i].loglik == o[i].loglik);
      }
      CHECK(rel_diff(k::omp::score(o, p.xb, p.xa), k::serial::score(s, p.xb, p.xa)) <= 1e-12);
      CHECK(rel_diff(k::omp::info(o, p.xb, p.xa), k::serial::info(s, p.xb, p.xa)) <= 1e-12);
      const double ls = k::serial::loglik(s);
      CHECK(std::abs(k::omp::loglik(o) - ls) <= 1e-12 * std::abs(ls));
    }
  }
  CHECK(rel_diff(k::omp::weighted_gram(p.xb, p.w), k::serial::weighted_gram(p.xb, p.w)) <= 1e-12);
  CHECK(rel_diff(k::omp::cross(p.xb, p.w), k::serial::cross(p.xb, p.w)) <= 1e-12);
  CHECK(rel_diff(k::serial::weighted_gram(p.xb, p.w), p.xb.transpose() * p.w.asDiagonal() * p.xb) <= 1e-12);
}

TEST_CASE("parallel kernels are bit-identical across thread counts", "[kernels][determinism]")
{
  const Problem p = make_problem(5 * k::kBlockRows + 13, 5);
  const BaseCount base = BaseCount::binomial(8);
  const ZiType t = ZiType::additive();
  const k::Inputs in{base, t, false, p.theta, p.gamma, p.y};
  const int original = k::omp::max_threads();

  k::omp::set_threads(1);
  const std::vector<k::ObsEval> o1 = k::omp::evaluate(in);
  const Eigen::VectorXd s1 = k::omp::score(o1, p.xb, p.xa);
  const Eigen::MatrixXd i1 = k::omp::info(o1, p.xb, p.xa);
  const double l1 = k::omp::loglik(o1);
  const Eigen::MatrixXd g1 = k::omp::weighted_gram(p.xb, p.w);

  for (int threads : {2, 3, 8}) {
    k::omp::set_threads(threads);
    const std::vector<k::ObsEval> o = k::omp::evaluate(in);
    INFO("threads=" << threads);
    CHECK(k::omp::score(o, p.xb, p.xa) == s1);
    CHECK(k::omp::info(o, p.xb, p.xa) == i1);
    CHECK(k::omp::loglik(o) == l1);
    CHECK(k::omp::weighted_gram(p.xb, p.w) == g1);
  }
  k::omp::set_threads(original);
}

TEST_CASE("kernels handle an empty covariate side", "[kernels]")
{
  const Problem p = make_problem(40, 7);
  const Eigen::MatrixXd none(40, 0);
  const BaseCount base = BaseCount::poisson();
  const ZiType t = ZiType::multiplicative();
  const std::vector<k::ObsEval> o = k::evaluate({base, t, true, p.theta, p.gamma, p.y});
  CHECK(k::score(o, p.xb, none).size() == 3);
  CHECK(k::info(o, p.xb, none).rows() == 3);
}
