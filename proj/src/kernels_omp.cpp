#include <exception>

#include "zinfer/kernels.hpp"

#ifdef ZINFER_HAVE_OPENMP
#include <omp.h>
#endif

namespace zinfer::kernels::omp {

namespace {

Eigen::Index block_count(Eigen::Index n) { return (n + kBlockRows - 1) / kBlockRows; }

struct Block {
  Eigen::Index begin;
  Eigen::Index size;
};

Block block(Eigen::Index b, Eigen::Index n)
{
  const Eigen::Index begin = b * kBlockRows;
  return {begin, std::min(kBlockRows, n - begin)};
}

// Partial results are summed in block order after the parallel region; the
// association of the floating-point sum is then independent of scheduling.
template <typename T, typename F>
T reduce_blocks(Eigen::Index n, T zero, F&& partial)
{
  const Eigen::Index nb = block_count(n);
  std::vector<T> parts(static_cast<std::size_t>(nb), zero);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < nb; ++b)
    parts[static_cast<std::size_t>(b)] = partial(block(b, n));
  T total = zero;
  for (const auto& part : parts)
    total += part;
  return total;
}

}  // namespace

int max_threads()
{
#ifdef ZINFER_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n)
{
#ifdef ZINFER_HAVE_OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

std::vector<ObsEval> evaluate(const Inputs& in)
{
  const auto n = static_cast<Eigen::Index>(in.y.size());
  std::vector<ObsEval> out(static_cast<std::size_t>(n));
  const Eigen::Index nb = block_count(n);
  // Exceptions may not cross the parallel region; keep the one from the
  // lowest block so the reported error is deterministic.
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Block blk = block(b, n);
    try {
      for (Eigen::Index i = blk.begin; i < blk.begin + blk.size; ++i) {
        const double gamma = in.null_zi ? 0.0 : in.gamma(i);
        out[static_cast<std::size_t>(i)] =
            evaluate_one(in.base, in.type, in.null_zi, in.theta(i), gamma, in.y[static_cast<std::size_t>(i)]);
      }
    }
    catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

Eigen::VectorXd score(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa)
{
  const Eigen::Index p = xb.cols();
  const Eigen::Index q = xa.cols();
  const auto n = static_cast<Eigen::Index>(obs.size());
  return reduce_blocks(n, Eigen::VectorXd::Zero(p + q).eval(), [&](Block blk) {
    Eigen::VectorXd st(blk.size);
    Eigen::VectorXd sg(blk.size);
    for (Eigen::Index k = 0; k < blk.size; ++k) {
      st(k) = obs[static_cast<std::size_t>(blk.begin + k)].s_theta;
      sg(k) = obs[static_cast<std::size_t>(blk.begin + k)].s_gamma;
    }
    Eigen::VectorXd g(p + q);
    g.head(p).noalias() = xb.middleRows(blk.begin, blk.size).transpose() * st;
    g.tail(q).noalias() = xa.middleRows(blk.begin, blk.size).transpose() * sg;
    return g;
  });
}

Eigen::MatrixXd info(std::span<const ObsEval> obs, const Eigen::MatrixXd& xb, const Eigen::MatrixXd& xa)
{
  const Eigen::Index p = xb.cols();
  const Eigen::Index q = xa.cols();
  const auto n = static_cast<Eigen::Index>(obs.size());
  Eigen::MatrixXd m = reduce_blocks(n, Eigen::MatrixXd::Zero(p + q, p + q).eval(), [&](Block blk) {
    Eigen::VectorXd ftt(blk.size), ftg(blk.size), fgg(blk.size);
    for (Eigen::Index k = 0; k < blk.size; ++k) {
      const ObsEval& o = obs[static_cast<std::size_t>(blk.begin + k)];
      ftt(k) = o.f_tt;
      ftg(k) = o.f_tg;
      fgg(k) = o.f_gg;
    }
    const auto b = xb.middleRows(blk.begin, blk.size);
    const auto a = xa.middleRows(blk.begin, blk.size);
    Eigen::MatrixXd part(p + q, p + q);
    part.topLeftCorner(p, p).noalias() = b.transpose() * ftt.asDiagonal() * b;
    part.topRightCorner(p, q).noalias() = b.transpose() * ftg.asDiagonal() * a;
    part.bottomRightCorner(q, q).noalias() = a.transpose() * fgg.asDiagonal() * a;
    part.bottomLeftCorner(q, p) = part.topRightCorner(p, q).transpose();
    return part;
  });
  return m;
}

double loglik(std::span<const ObsEval> obs)
{
  const auto n = static_cast<Eigen::Index>(obs.size());
  return reduce_blocks(n, 0.0, [&](Block blk) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < blk.size; ++k)
      s += obs[static_cast<std::size_t>(blk.begin + k)].loglik;
    return s;
  });
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w)
{
  const Eigen::Index p = x.cols();
  return reduce_blocks(x.rows(), Eigen::MatrixXd::Zero(p, p).eval(), [&](Block blk) {
    const auto xs = x.middleRows(blk.begin, blk.size);
    Eigen::MatrixXd part = xs.transpose() * w.segment(blk.begin, blk.size).asDiagonal() * xs;
    return part;
  });
}

Eigen::VectorXd cross(const Eigen::MatrixXd& x, const Eigen::VectorXd& r)
{
  return reduce_blocks(x.rows(), Eigen::VectorXd::Zero(x.cols()).eval(), [&](Block blk) {
    Eigen::VectorXd part = x.middleRows(blk.begin, blk.size).transpose() * r.segment(blk.begin, blk.size);
    return part;
  });
}

}  // namespace zinfer::kernels::omp
