#include "zinfer/fit.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

#include "logistic_irls.hpp"
#include "zinfer/errors.hpp"
#include "zinfer/kernels.hpp"
#include "zinfer/numeric.hpp"

namespace zinfer {

FitOptions FitOptions::from_env()
{
  FitOptions opts;
  if (const char* raw = std::getenv("ZINFER_MAX_ITER"); raw != nullptr && *raw != '\0') {
    char* end = nullptr;
    errno = 0;
    const long value = std::strtol(raw, &end, 10);
    if (errno != 0 || *end != '\0' || value < 1 || value > 1000000)
      throw DomainError(std::string("ZINFER_MAX_ITER must be a positive integer, got '") + raw + "'");
    opts.max_outer = static_cast<int>(value);
  }
  return opts;
}

Eigen::Index FitResult::parameter_count() const
{
  if (!omega_identified)
    return beta.size();
  return beta.size() + alpha.size() + (tau_estimated ? 2 : 0);
}

Eigen::VectorXd FitResult::standard_errors() const
{
  Eigen::VectorXd se(cov.rows());
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    se(i) = cov(i, i) >= 0.0 ? std::sqrt(cov(i, i)) : std::numeric_limits<double>::quiet_NaN();
  return se;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Eval {
  std::vector<kernels::ObsEval> obs;
  double loglik;
};

Eval evaluate_at(const Dataset& data, const BaseCount& base, const ZiType& type, const Eigen::VectorXd& beta,
                 const Eigen::VectorXd& alpha)
{
  const Eigen::VectorXd theta = linear_predictor(data.x_beta, beta);
  const Eigen::VectorXd gamma = linear_predictor(data.x_alpha, alpha);
  Eval e;
  e.obs = kernels::evaluate({base, type, data.q() == 0, theta, gamma, data.y});
  e.loglik = kernels::loglik(e.obs);
  return e;
}

std::vector<LogPi0> log_pi0_at(const Dataset& data, const BaseCount& base, const Eigen::VectorXd& beta)
{
  const Eigen::VectorXd theta = linear_predictor(data.x_beta, beta);
  std::vector<LogPi0> out;
  out.reserve(data.n());
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    out.push_back(LogPi0::from_log(base.log_pi0(theta(i))));
  return out;
}

Eigen::VectorXd zero_indicator(const Dataset& data)
{
  Eigen::VectorXd t(static_cast<Eigen::Index>(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i)
    t(static_cast<Eigen::Index>(i)) = data.y[i] == 0 ? 1.0 : 0.0;
  return t;
}

// [X_alpha | log pi0 | log(1 - pi0)]: the alpha design once tau is a parameter.
Eigen::MatrixXd tau_design(const Dataset& data, const std::vector<LogPi0>& lp)
{
  const Eigen::Index q = data.q();
  Eigen::MatrixXd z(static_cast<Eigen::Index>(data.n()), q + 2);
  z.leftCols(q) = data.x_alpha;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    z(static_cast<Eigen::Index>(i), q) = lp[i].log_p0;
    z(static_cast<Eigen::Index>(i), q + 1) = lp[i].log_1mp0;
  }
  return z;
}

double theta_from_mean(const BaseCount& base, double mu)
{
  if (base.kind() == BaseCount::Kind::Poisson)
    return std::log(mu);
  return logit(mu / static_cast<double>(base.trials()));
}

Dataset without_inflation(const Dataset& data)
{
  Dataset null_data;
  null_data.y = data.y;
  null_data.x_beta = data.x_beta;
  null_data.x_alpha = Eigen::MatrixXd(data.x_beta.rows(), 0);
  null_data.beta_names = data.beta_names;
  return null_data;
}

}  // namespace

// ---------------------------------------------------------------------------
// iid

FitResult fit_iid(const BaseCount& base, const ZiType& type, std::span<const Count> y, const FitOptions& options)
{
  Dataset data = iid_dataset(std::vector<Count>(y.begin(), y.end()));
  data.validate(base);
  const std::size_t n = data.n();
  const std::size_t n0 = data.n_zero();
  if (n0 == n)
    throw FitError("all-zero data: the base distribution is not identified");
  if (n0 == 0)
    throw FitError("no-zero data: the inflation degree is not identified");

  double sum_pos = 0.0;
  for (Count v : data.y)
    sum_pos += static_cast<double>(v);
  const double m_pos = sum_pos / static_cast<double>(n - n0);
  const double upper = base.kind() == BaseCount::Kind::Binomial ? static_cast<double>(base.trials()) : kNaN;
  if (m_pos <= 1.0 + 1e-12 || (base.kind() == BaseCount::Kind::Binomial && m_pos >= upper - 1e-12))
    throw FitError("positive counts are all at a support boundary: the base mean is not identified");

  // mu / (1 - pi0(mu)) = mean of the positives, solved by re-scaling
  // mu <- m+ (1 - pi0(mu)), Aitken-accelerated.
  auto rescale = [&](double mu) { return -m_pos * std::expm1(base.log_pi0(theta_from_mean(base, mu))); };
  double mu = m_pos;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iid; ++it) {
    const double m1 = rescale(mu);
    const double m2 = rescale(m1);
    const double denom = m2 - 2.0 * m1 + mu;
    double next = m2;
    if (std::abs(denom) > 1e-300) {
      const double aitken = mu - (m1 - mu) * (m1 - mu) / denom;
      if (aitken > 0.0 && (base.kind() != BaseCount::Kind::Binomial || aitken < upper))
        next = aitken;
    }
    const double change = std::abs(next - mu);
    mu = next;
    if (change <= 1e-15 * std::max(1.0, mu)) {
      converged = true;
      ++it;
      break;
    }
  }

  const double theta = theta_from_mean(base, mu);
  const LogPi0 lp = LogPi0::from_log(base.log_pi0(theta));
  const double omega = logit(static_cast<double>(n0) / static_cast<double>(n)) - lp.logit();
  const double gamma = type.gamma_from_omega(omega, lp);

  FitResult r;
  r.base = base;
  r.type = type;
  r.beta = Eigen::VectorXd::Constant(1, theta);
  r.alpha = Eigen::VectorXd::Constant(1, gamma);
  r.beta_names = data.beta_names;
  r.alpha_names = data.alpha_names;
  r.n = n;
  r.n0 = n0;
  r.data_fingerprint = data.fingerprint();
  r.iterations = it;
  r.converged = converged;
  if (!converged)
    r.message = "iterative re-scaling did not converge in " + std::to_string(options.max_iid) + " iterations";

  const Eval e = evaluate_at(data, base, type, r.beta, r.alpha);
  r.loglik = e.loglik;
  r.loglik_trace.push_back(r.loglik);
  const Eigen::VectorXd grad = kernels::score(e.obs, data.x_beta, data.x_alpha);
  r.score_norm = grad.lpNorm<Eigen::Infinity>();
  const Eigen::MatrixXd info = kernels::info(e.obs, data.x_beta, data.x_alpha);
  r.cov = detail::covariance_from_info(info, r.info_condition, r.near_singular);
  r.per_obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ZiDerived& d = e.obs[i].d;
    r.per_obs.push_back({d.pi0, d.pi0_tilde, d.phi, d.psi, d.omega});
    r.ess += data.y[i] == 0 ? d.psi : 1.0;
  }
  return r;
}

// ---------------------------------------------------------------------------
// beta step

BetaFit fit_beta_given_alpha(const Dataset& data, const BaseCount& base, const ZiType& type,
                             const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta0, const FitOptions& options,
                             bool allow_nonmonotone)
{
  if (!allow_nonmonotone && data.q() > 0 && !type.monotone())
    throw FitError("zero-inflation type " + type.name() +
                   " is not monotone: pi0~ falls as pi0 rises somewhere (the omega = gamma log(pi0) pathology), "
                   "so observed zeros would receive negative weights");
  if (beta0.size() != data.p())
    throw DomainError("beta start has length " + std::to_string(beta0.size()) + ", design has " +
                      std::to_string(data.p()) + " columns");

  const auto n = static_cast<Eigen::Index>(data.n());
  const double inner_tol = 0.1 * options.score_tol;
  BetaFit out;
  out.beta = beta0;
  Eval cur = evaluate_at(data, base, type, out.beta, alpha);

  Eigen::VectorXd s_theta(n);
  Eigen::VectorXd w(n);
  // The quasi-likelihood weights leave out the rho(1 - rho)mu^2 part of the
  // curvature, so the fixed point contracts slowly when rho is far from 1.
  // Once a step fails to halve the gradient, switch to Fisher scoring.
  bool scoring = false;
  double last_grad = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_inner; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const kernels::ObsEval& o = cur.obs[static_cast<std::size_t>(i)];
      s_theta(i) = o.s_theta;
      // case weight psi^I phi times the variance function of the working response
      w(i) = scoring ? o.f_tt : (data.y[static_cast<std::size_t>(i)] == 0 ? o.d.psi : 1.0) * o.d.phi * o.d.var;
    }
    const Eigen::VectorXd grad = kernels::cross(data.x_beta, s_theta);
    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= inner_tol)
      break;
    if (!scoring && grad_norm > 0.5 * last_grad) {
      scoring = true;
      for (Eigen::Index i = 0; i < n; ++i)
        w(i) = cur.obs[static_cast<std::size_t>(i)].f_tt;
    }
    last_grad = grad_norm;

    // The IRLS solve written as an update: (X^T W X) step = X^T W (ydot - mu).
    Eigen::VectorXd step;
    const Eigen::MatrixXd m = kernels::weighted_gram(data.x_beta, w);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 0.0) {
      step = ldlt.solve(grad);
    }
    else {
      // Negative zero weights (tau still moving); use the expected-information block.
      for (Eigen::Index i = 0; i < n; ++i)
        w(i) = cur.obs[static_cast<std::size_t>(i)].f_tt;
      step = kernels::weighted_gram(data.x_beta, w).completeOrthogonalDecomposition().solve(grad);
    }

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      const Eigen::VectorXd cand = out.beta + t * step;
      try {
        Eval e = evaluate_at(data, base, type, cand, alpha);
        if (std::isfinite(e.loglik) && e.loglik >= cur.loglik - 1e-13 * (1.0 + std::abs(cur.loglik))) {
          out.beta = cand;
          cur = std::move(e);
          accepted = true;
          break;
        }
      }
      catch (const InflationOverflow&) {
      }
      catch (const DomainError&) {
      }
      t *= 0.5;
    }
    if (!accepted)
      throw FitError("beta IRLS diverged: no improving step after " + std::to_string(options.max_halvings) +
                     " step halvings");
    ++out.iterations;
    if ((t * step).lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + out.beta.lpNorm<Eigen::Infinity>()))
      break;
  }
  out.loglik = cur.loglik;
  return out;
}

// ---------------------------------------------------------------------------
// alpha steps

AlphaFit fit_alpha_given_beta(const Dataset& data, const BaseCount& base, const ZiType& type,
                              const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha0, const FitOptions& options)
{
  if (type.is_mixture())
    throw FitError("the mixture type is fitted by EM (fit_mixture_alpha), not by offset logistic regression");
  if (alpha0.size() != data.q())
    throw DomainError("alpha start has length " + std::to_string(alpha0.size()) + ", design has " +
                      std::to_string(data.q()) + " columns");

  const std::vector<LogPi0> lp = log_pi0_at(data, base, beta);
  Eigen::VectorXd offset(static_cast<Eigen::Index>(lp.size()));
  for (std::size_t i = 0; i < lp.size(); ++i)
    offset(static_cast<Eigen::Index>(i)) = type.tau1() * lp[i].log_p0 + type.tau2() * lp[i].log_1mp0 + lp[i].logit();

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(offset.size());
  const detail::LogisticResult res =
      detail::logistic_irls(data.x_alpha, zero_indicator(data), ones, offset, alpha0, options, 0.1 * options.score_tol);
  return {res.coef, res.iterations, res.separated};
}

AlphaFit fit_mixture_alpha(const Dataset& data, const BaseCount& base, const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& alpha0, const FitOptions& options)
{
  if (alpha0.size() != data.q())
    throw DomainError("alpha start has length " + std::to_string(alpha0.size()) + ", design has " +
                      std::to_string(data.q()) + " columns");
  const ZiType mixture = ZiType::mixture();
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto n0 = static_cast<Eigen::Index>(data.n_zero());
  const Eigen::Index q = data.q();

  // Augmented set (J+, X+): every observation once with J = 1, then each zero
  // again with J = 0. Only the case weights change between iterations.
  Eigen::MatrixXd x_aug(n + n0, q);
  Eigen::VectorXd j_aug(n + n0);
  std::vector<Eigen::Index> zero_rows;
  zero_rows.reserve(static_cast<std::size_t>(n0));
  x_aug.topRows(n) = data.x_alpha;
  j_aug.head(n).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.y[static_cast<std::size_t>(i)] == 0) {
      x_aug.row(n + static_cast<Eigen::Index>(zero_rows.size())) = data.x_alpha.row(i);
      zero_rows.push_back(i);
    }
  }
  j_aug.tail(n0).setZero();
  const Eigen::VectorXd no_offset = Eigen::VectorXd::Zero(n + n0);
  Eigen::VectorXd w_aug = Eigen::VectorXd::Ones(n + n0);
  Eigen::VectorXd s_gamma(n);

  AlphaFit out;
  out.alpha = alpha0;
  double last_change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_em; ++it) {
    const Eval e = evaluate_at(data, base, mixture, beta, out.alpha);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ZiDerived& d = e.obs[static_cast<std::size_t>(i)].d;
      if (!(d.kappa > 0.0))
        throw FitError("mixture needs zero over-inflation (kappa > 0) at every observation; "
                       "use a tau-family type (multiplicative, additive, hurdle, custom) for deflated zeros");
      s_gamma(i) = e.obs[static_cast<std::size_t>(i)].s_gamma;
    }
    const double score_norm = kernels::cross(data.x_alpha, s_gamma).lpNorm<Eigen::Infinity>();
    if (score_norm <= 0.1 * options.score_tol && last_change <= options.em_tol)
      break;

    // E-step: a zero came from the base distribution with probability e^-omega.
    for (std::size_t k = 0; k < zero_rows.size(); ++k) {
      const double omega = e.obs[static_cast<std::size_t>(zero_rows[k])].d.omega;
      w_aug(zero_rows[k]) = std::exp(-omega);
      w_aug(n + static_cast<Eigen::Index>(k)) = -std::expm1(-omega);
    }
    const detail::LogisticResult m =
        detail::logistic_irls(x_aug, j_aug, w_aug, no_offset, out.alpha, options, 0.01 * options.score_tol);
    last_change = (m.coef - out.alpha).lpNorm<Eigen::Infinity>();
    out.alpha = m.coef;
    ++out.iterations;
    if (m.separated) {
      out.separated = true;
      break;
    }
    if (last_change == 0.0)
      break;
  }
  return out;
}

namespace {

TauEstimate estimate_tau_from(const Dataset& data, const BaseCount& base, const Eigen::VectorXd& beta,
                              const Eigen::VectorXd& init, const FitOptions& options)
{
  const std::vector<LogPi0> lp = log_pi0_at(data, base, beta);
  const auto n = static_cast<Eigen::Index>(lp.size());
  Eigen::VectorXd offset(n);
  for (Eigen::Index i = 0; i < n; ++i)
    offset(i) = lp[static_cast<std::size_t>(i)].logit();
  const double mean = offset.mean();
  const double sd = n > 1 ? std::sqrt((offset.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
  if (!(sd >= 0.05))
    throw FitError("type not identifiable: logit(pi0) barely varies across observations (sd " +
                   std::to_string(sd) + " < 0.05), so tau cannot be separated from the alpha intercept");

  const Eigen::MatrixXd z = tau_design(data, lp);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const detail::LogisticResult res =
      detail::logistic_irls(z, zero_indicator(data), ones, offset, init, options, 0.1 * options.score_tol);

  TauEstimate out;
  const Eigen::Index q = data.q();
  out.alpha = res.coef.head(q);
  out.tau1 = res.coef(q);
  out.tau2 = res.coef(q + 1);
  double condition = 0.0;
  out.cov = detail::covariance_from_info(res.info, condition, out.near_singular);
  out.separated = res.separated;
  out.iterations = res.iterations;
  return out;
}

}  // namespace

TauEstimate estimate_tau(const Dataset& data, const BaseCount& base, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& alpha0, const FitOptions& options)
{
  if (alpha0.size() != data.q())
    throw DomainError("alpha start has length " + std::to_string(alpha0.size()) + ", design has " +
                      std::to_string(data.q()) + " columns");
  Eigen::VectorXd init = Eigen::VectorXd::Zero(data.q() + 2);
  init.head(data.q()) = alpha0;
  return estimate_tau_from(data, base, beta, init, options);
}

// ---------------------------------------------------------------------------
// joint fits

Eigen::VectorXd fit_null_glm(const Dataset& data, const BaseCount& base, const FitOptions& options)
{
  const Dataset null_data = without_inflation(data);
  if (null_data.p() == 0)
    return Eigen::VectorXd(0);

  // Least-squares start on a shifted link of y.
  Eigen::VectorXd eta(static_cast<Eigen::Index>(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double y = static_cast<double>(data.y[i]);
    eta(static_cast<Eigen::Index>(i)) = base.kind() == BaseCount::Kind::Poisson
                                            ? std::log(y + 0.5)
                                            : logit((y + 0.5) / (static_cast<double>(base.trials()) + 1.0));
  }
  const Eigen::VectorXd start = data.x_beta.colPivHouseholderQr().solve(eta);
  const Eigen::VectorXd empty(0);
  return fit_beta_given_alpha(null_data, base, ZiType::multiplicative(), empty, start, options).beta;
}

namespace {

struct JointSetup {
  bool estimate_tau = false;
  ZiType type = ZiType::multiplicative();
};

// Score and information at (beta, alpha[, tau]); the alpha design gains the
// f_k(pi0) columns when tau is a parameter.
struct JointEval {
  Eval eval;
  Eigen::MatrixXd x_alpha;
  Eigen::VectorXd score;
};

JointEval joint_eval(const Dataset& data, const BaseCount& base, const ZiType& type, const Eigen::VectorXd& beta,
                     const Eigen::VectorXd& alpha, bool with_tau)
{
  JointEval j;
  j.eval = evaluate_at(data, base, type, beta, alpha);
  j.x_alpha = with_tau ? tau_design(data, log_pi0_at(data, base, beta)) : data.x_alpha;
  j.score = kernels::score(j.eval.obs, data.x_beta, j.x_alpha);
  return j;
}

void finalize(FitResult& r, const Dataset& data, const JointEval& j)
{
  r.loglik = j.eval.loglik;
  r.score_norm = j.score.size() > 0 ? j.score.lpNorm<Eigen::Infinity>() : 0.0;
  const Eigen::MatrixXd info = kernels::info(j.eval.obs, data.x_beta, j.x_alpha);
  r.cov = detail::covariance_from_info(info, r.info_condition, r.near_singular);
  r.per_obs.clear();
  r.per_obs.reserve(data.n());
  r.ess = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const ZiDerived& d = j.eval.obs[i].d;
    r.per_obs.push_back({d.pi0, d.pi0_tilde, d.phi, d.psi, d.omega});
    r.ess += data.y[i] == 0 ? d.psi : 1.0;
  }
  if (r.near_singular) {
    if (!r.message.empty())
      r.message += "; ";
    r.message += "near-singular information: covariance is a pseudo-inverse";
  }
}

FitResult fit_joint_impl(const Dataset& input, const BaseCount& base, const JointSetup& setup,
                         const FitOptions& options)
{
  Dataset data = input;
  data.validate(base);
  const std::size_t n0 = data.n_zero();
  if (n0 == data.n())
    throw FitError("all-zero response: the base distribution is not identified");

  FitResult r;
  r.base = base;
  r.type = setup.type;
  r.tau_estimated = setup.estimate_tau;
  r.beta_names = data.beta_names;
  r.alpha_names = data.alpha_names;
  r.n = data.n();
  r.n0 = n0;
  r.data_fingerprint = data.fingerprint();

  Eigen::VectorXd beta = fit_null_glm(data, base, options);

  if (data.q() == 0 || n0 == 0) {
    // No inflation side to fit: the null GLM is the answer.
    const Dataset null_data = without_inflation(data);
    r.beta = beta;
    r.tau_estimated = false;
    if (data.q() == 0) {
      r.alpha = Eigen::VectorXd(0);
    }
    else {
      r.alpha = Eigen::VectorXd::Constant(data.q(), kNaN);
      r.omega_identified = false;
      r.message = "no zero counts: inflation degree not identified, null GLM reported";
    }
    const JointEval j = joint_eval(null_data, base, r.type, beta, Eigen::VectorXd(0), false);
    r.loglik_trace.push_back(j.eval.loglik);
    r.converged = j.score.size() == 0 || j.score.lpNorm<Eigen::Infinity>() <= options.score_tol;
    r.iterations = 1;
    finalize(r, null_data, j);
    return r;
  }

  if (!setup.estimate_tau && !setup.type.monotone())
    throw FitError("zero-inflation type " + setup.type.name() +
                   " is not monotone: pi0~ falls as pi0 rises somewhere (the omega = gamma log(pi0) pathology), "
                   "so observed zeros would receive negative weights");

  ZiType type = setup.type;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(data.q());
  double tau1 = type.tau1();
  double tau2 = type.tau2();

  JointEval j = joint_eval(data, base, type, beta, alpha, setup.estimate_tau);
  r.loglik_trace.push_back(j.eval.loglik);

  for (int outer = 1; outer <= options.max_outer; ++outer) {
    const Eigen::VectorXd beta_prev = beta;
    const Eigen::VectorXd alpha_prev = alpha;
    const double tau1_prev = tau1;
    const double tau2_prev = tau2;

    beta = fit_beta_given_alpha(data, base, type, alpha, beta, options, setup.estimate_tau).beta;

    if (setup.estimate_tau) {
      Eigen::VectorXd init(data.q() + 2);
      init << alpha, tau1, tau2;
      const TauEstimate te = estimate_tau_from(data, base, beta, init, options);
      alpha = te.alpha;
      tau1 = te.tau1;
      tau2 = te.tau2;
      type = ZiType::tau_family(tau1, tau2);
      r.separation = r.separation || te.separated;
    }
    else if (type.is_mixture()) {
      const AlphaFit af = fit_mixture_alpha(data, base, beta, alpha, options);
      alpha = af.alpha;
      r.separation = r.separation || af.separated;
    }
    else {
      const AlphaFit af = fit_alpha_given_beta(data, base, type, beta, alpha, options);
      alpha = af.alpha;
      r.separation = r.separation || af.separated;
    }

    j = joint_eval(data, base, type, beta, alpha, setup.estimate_tau);
    r.loglik_trace.push_back(j.eval.loglik);
    r.iterations = outer;

    double change = std::max((beta - beta_prev).lpNorm<Eigen::Infinity>(),
                             (alpha - alpha_prev).lpNorm<Eigen::Infinity>());
    change = std::max({change, std::abs(tau1 - tau1_prev), std::abs(tau2 - tau2_prev)});
    if (j.score.lpNorm<Eigen::Infinity>() <= options.score_tol && change <= options.param_tol) {
      r.converged = true;
      break;
    }
    if (r.separation)
      break;
  }

  if (r.converged) {
    // Settle the trailing digits with a few joint Fisher-scoring steps, so the
    // reported estimates do not depend on where the alternation stopped.
    const Eigen::Index p = beta.size();
    const Eigen::Index q = alpha.size();
    for (int k = 0; k < 4; ++k) {
      const double norm = j.score.lpNorm<Eigen::Infinity>();
      if (norm == 0.0)
        break;
      const Eigen::MatrixXd info = kernels::info(j.eval.obs, data.x_beta, j.x_alpha);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        break;
      const Eigen::VectorXd step = ldlt.solve(j.score);
      if (!step.allFinite())
        break;
      const Eigen::VectorXd beta_c = beta + step.head(p);
      const Eigen::VectorXd alpha_c = alpha + step.segment(p, q);
      ZiType type_c = type;
      if (setup.estimate_tau)
        type_c = ZiType::tau_family(tau1 + step(p + q), tau2 + step(p + q + 1));
      try {
        JointEval c = joint_eval(data, base, type_c, beta_c, alpha_c, setup.estimate_tau);
        if (!(c.score.lpNorm<Eigen::Infinity>() < norm) ||
            c.eval.loglik < j.eval.loglik - 1e-13 * (1.0 + std::abs(j.eval.loglik)))
          break;
        beta = beta_c;
        alpha = alpha_c;
        type = type_c;
        tau1 = type.tau1();
        tau2 = type.tau2();
        j = std::move(c);
      }
      catch (const InflationOverflow&) {
        break;
      }
      catch (const DomainError&) {
        break;
      }
    }
    r.loglik_trace.push_back(j.eval.loglik);
  }

  r.type = type;
  r.beta = beta;
  r.alpha = alpha;
  if (r.separation)
    r.message = "separation: |alpha| exceeded " + std::to_string(options.separation_bound) +
                ", zero probabilities are being pushed to 0 or 1";
  else if (!r.converged)
    r.message = "no convergence in " + std::to_string(options.max_outer) + " outer iterations";
  finalize(r, data, j);
  return r;
}

}  // namespace

FitResult fit_joint(const Dataset& data, const BaseCount& base, const ZiType& type, const FitOptions& options)
{
  return fit_joint_impl(data, base, {false, type}, options);
}

FitResult fit_joint_estimate_tau(const Dataset& data, const BaseCount& base, const FitOptions& options)
{
  return fit_joint_impl(data, base, {true, ZiType::multiplicative()}, options);
}

}  // namespace zinfer
