#pragma once

// Reference computations for the tests. Everything here is written from the
// defining formulas and shares no code with the library beyond plain types.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Base distribution described by its natural parameter.
struct Base {
  bool binomial = false;
  int trials = 0;

  double pmf(double theta, long y) const
  {
    if (!binomial) {
      const double lambda = std::exp(theta);
      return std::exp(static_cast<double>(y) * theta - lambda - std::lgamma(static_cast<double>(y) + 1.0));
    }
    if (y < 0 || y > trials)
      return 0.0;
    const double p = expit(theta);
    const double n = trials;
    const double k = static_cast<double>(y);
    return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) + k * std::log(p) +
                    (n - k) * std::log1p(-p));
  }
  double mean(double theta) const { return binomial ? trials * expit(theta) : std::exp(theta); }
  double var(double theta) const
  {
    if (!binomial)
      return std::exp(theta);
    const double p = expit(theta);
    return trials * p * (1 - p);
  }
  long cutoff(double theta) const
  {
    if (binomial)
      return trials;
    const double l = std::exp(theta);
    return static_cast<long>(l + 30.0 * std::sqrt(l) + 60.0);
  }
};

/// Zero-inflation described directly by omega(gamma, pi0).
struct Zi {
  bool mixture = false;
  double tau1 = 0.0;
  double tau2 = 0.0;

  double omega(double gamma, double pi0) const
  {
    if (mixture)
      return std::log(pi0 + std::exp(-gamma)) - std::log(pi0);
    return gamma + tau1 * std::log(pi0) + tau2 * std::log(1.0 - pi0);
  }
};

/// pi~_y straight from the odds-ratio definition.
inline double zi_pmf(const Base& b, const Zi& z, double theta, double gamma, long y)
{
  const double pi0 = b.pmf(theta, 0);
  const double odds = std::exp(z.omega(gamma, pi0)) * pi0 / (1.0 - pi0);
  const double pt0 = odds / (1.0 + odds);
  if (y == 0)
    return pt0;
  return (1.0 - pt0) / (1.0 - pi0) * b.pmf(theta, y);
}

/// Bisection for a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14)
{
  double flo = f(lo);
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    }
    else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Central-difference gradient.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double rel_step = 1e-6)
{
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    Eigen::VectorXd a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// Nelder-Mead maximiser (derivative-free), restarted until the simplex stops moving.
inline Eigen::VectorXd nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                       double step = 0.1, int restarts = 8, int max_iter = 20000)
{
  const Eigen::Index d = x0.size();
  auto neg = [&](const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };
  for (int r = 0; r < restarts; ++r) {
    std::vector<Eigen::VectorXd> s(static_cast<std::size_t>(d + 1), x0);
    std::vector<double> fv(static_cast<std::size_t>(d + 1));
    for (Eigen::Index i = 0; i < d; ++i)
      s[static_cast<std::size_t>(i + 1)](i) += step;
    for (std::size_t i = 0; i < s.size(); ++i)
      fv[i] = neg(s[i]);
    for (int it = 0; it < max_iter; ++it) {
      std::vector<std::size_t> idx(s.size());
      for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      std::vector<Eigen::VectorXd> s2;
      std::vector<double> f2;
      for (std::size_t i : idx) {
        s2.push_back(s[i]);
        f2.push_back(fv[i]);
      }
      s = s2;
      fv = f2;
      if (std::abs(fv.back() - fv.front()) < 1e-14 * (1 + std::abs(fv.front())) &&
          (s.back() - s.front()).lpNorm<Eigen::Infinity>() < 1e-10)
        break;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
      for (Eigen::Index i = 0; i < d; ++i)
        c += s[static_cast<std::size_t>(i)];
      c /= static_cast<double>(d);
      const Eigen::VectorXd& worst = s.back();
      const Eigen::VectorXd xr = c + (c - worst);
      const double fr = neg(xr);
      if (fr < fv.front()) {
        const Eigen::VectorXd xe = c + 2.0 * (c - worst);
        const double fe = neg(xe);
        if (fe < fr) {
          s.back() = xe;
          fv.back() = fe;
        }
        else {
          s.back() = xr;
          fv.back() = fr;
        }
      }
      else if (fr < fv[fv.size() - 2]) {
        s.back() = xr;
        fv.back() = fr;
      }
      else {
        const Eigen::VectorXd xc = c + 0.5 * (worst - c);
        const double fc = neg(xc);
        if (fc < fv.back()) {
          s.back() = xc;
          fv.back() = fc;
        }
        else {
          for (std::size_t i = 1; i < s.size(); ++i) {
            s[i] = s[0] + 0.5 * (s[i] - s[0]);
            fv[i] = neg(s[i]);
          }
        }
      }
    }
    x0 = s.front();
    step *= 0.3;
  }
  return x0;
}

/// Poisson regression by textbook IRLS: z = eta + (y - mu)/mu, weights mu.
inline Eigen::VectorXd poisson_glm(const Eigen::MatrixXd& x, const std::vector<long>& y)
{
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  const Eigen::Index n = x.rows();
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd z(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mu = std::exp(eta(i));
      z(i) = eta(i) + (static_cast<double>(y[static_cast<std::size_t>(i)]) - mu) / mu;
      w(i) = mu;
    }
    const Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
    const Eigen::VectorXd next = xtwx.ldlt().solve(x.transpose() * w.asDiagonal() * z);
    const double change = (next - beta).lpNorm<Eigen::Infinity>();
    beta = next;
    if (change < 1e-14)
      break;
  }
  return beta;
}

/// Zero-truncated Poisson regression on the positive rows by Newton's method
/// on sum [y theta - log(e^lambda - 1) - log y!].
inline Eigen::VectorXd truncated_poisson_glm(const Eigen::MatrixXd& x, const std::vector<long>& y)
{
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > 0)
      rows.push_back(static_cast<Eigen::Index>(i));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.cols());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    for (Eigen::Index r : rows) {
      const Eigen::VectorXd xi = x.row(r).transpose();
      const double lambda = std::exp(xi.dot(beta));
      const double q = -std::expm1(-lambda);  // 1 - e^-lambda
      const double m = lambda / q;            // truncated mean
      const double v = m * (1.0 + lambda - m);
      g += (static_cast<double>(y[static_cast<std::size_t>(r)]) - m) * xi;
      h += v * xi * xi.transpose();
    }
    const Eigen::VectorXd step = h.ldlt().solve(g);
    beta += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-14)
      break;
  }
  return beta;
}

/// Upper tail of the chi-square distribution, via the regularised gamma function.
double chisq_upper_tail(double stat, double dof);

/// Pearson chi-square p-value for counts against probabilities, pooling the
/// upper tail so that every expected cell holds at least min_expected.
double chisq_gof_pvalue(const std::vector<long>& draws, const std::function<double(long)>& pmf,
                        double min_expected = 5.0);

}  // namespace oracle
