#include <Eigen/QR>

#include "hics/hisolve.hpp"

namespace hics {

namespace {

template <typename Scalar>
LeastSquaresResult<Scalar> cgls(const Mat<Scalar>& c, const Vec<Scalar>& y, double tol, Index max_iters) {
  LeastSquaresResult<Scalar> out;
  Vec<Scalar> x = Vec<Scalar>::Zero(c.cols());
  Vec<Scalar> r = y;
  Vec<Scalar> s = c.adjoint() * r;
  Vec<Scalar> p = s;
  double gamma = s.squaredNorm();
  const double stop = tol * tol * gamma;
  out.converged = gamma == 0.0;
  Index it = 0;
  while (!out.converged && it < max_iters) {
    ++it;
    const Vec<Scalar> q = c * p;
    const double qq = q.squaredNorm();
    if (qq == 0.0) {
      break;
    }
    const double alpha = gamma / qq;
    x += alpha * p;
    r -= alpha * q;
    s = c.adjoint() * r;
    const double gamma_new = s.squaredNorm();
    if (gamma_new <= stop) {
      out.converged = true;
      break;
    }
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  out.x = std::move(x);
  out.iterations = it;
  if (!out.converged) {
    out.warning = "least squares: CGLS stopped after " + std::to_string(it) + " iterations without reaching ls_tol";
  }
  return out;
}

}  // namespace

template <typename Scalar>
LeastSquaresResult<Scalar> least_squares_on_support(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m,
                                                    std::span<const Index> support, double ls_tol,
                                                    Index ls_max_iters) {
  if (y.size() != m.rows()) {
    throw DimensionError("least_squares_on_support: y has length " + std::to_string(y.size()) + ", operator has " +
                         std::to_string(m.rows()) + " rows");
  }
  const auto k = static_cast<Index>(support.size());
  LeastSquaresResult<Scalar> out;
  out.x = Vec<Scalar>::Zero(m.cols());
  if (k == 0) {
    out.residual_norm = y.norm();
    return out;
  }
  const Mat<Scalar> c = m.columns(support);
  Vec<Scalar> coef;
  if (k <= kDenseLeastSquaresLimit) {
    coef = c.completeOrthogonalDecomposition().solve(y);
  } else {
    auto it = cgls<Scalar>(c, y, ls_tol, ls_max_iters > 0 ? ls_max_iters : 10 * k);
    coef = std::move(it.x);
    out.converged = it.converged;
    out.iterations = it.iterations;
    out.warning = std::move(it.warning);
  }
  if (k > m.rows() && out.warning.empty()) {
    out.warning = "least squares: support size " + std::to_string(k) + " exceeds the " + std::to_string(m.rows()) +
                  " measurements";
  }
  for (Index j = 0; j < k; ++j) {
    out.x[support[static_cast<std::size_t>(j)]] = coef[j];
  }
  out.residual_norm = (y - c * coef).norm();
  return out;
}

template <typename Scalar>
LeastSquaresResult<Scalar> least_squares_on_support(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m,
                                                    const HiSupport& support, double ls_tol, Index ls_max_iters) {
  const auto flat = support.flat(m.block_len());
  return least_squares_on_support<Scalar>(y, m, std::span<const Index>(flat), ls_tol, ls_max_iters);
}

#define HICS_INSTANTIATE(S)                                                                                  \
  template LeastSquaresResult<S> least_squares_on_support<S>(const Vec<S>&, const MeasurementOperator<S>&,   \
                                                             std::span<const Index>, double, Index);         \
  template LeastSquaresResult<S> least_squares_on_support<S>(const Vec<S>&, const MeasurementOperator<S>&,   \
                                                             const HiSupport&, double, Index);

HICS_INSTANTIATE(double)
HICS_INSTANTIATE(cplx)
#undef HICS_INSTANTIATE

}  // namespace hics
