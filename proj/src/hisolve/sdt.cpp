#include <cmath>
#include <limits>

#include "hics/hisolve.hpp"

namespace hics {

const char* to_string(DemixMode mode) {
  switch (mode) {
    case DemixMode::sdt:
      return "sdt";
    case DemixMode::dt:
      return "dt";
    case DemixMode::informed:
      return "informed";
  }
  return "unknown";
}

double sdt_block_step(const DemixOperator& a, Index i, const Eigen::MatrixXcd& g) {
  const double num = g.squaredNorm();
  if (num == 0.0) {
    return 1.0;
  }
  const double den = a.apply_block(i, g).squaredNorm();
  if (den < std::numeric_limits<double>::min()) {
    return 1.0;
  }
  const double mu = num / den;
  return std::isfinite(mu) ? mu : 1.0;
}

DemixResult sdt(const Eigen::VectorXd& y, const DemixOperator& a, Index s, Index r, const SolverConfig& config,
                DemixMode mode, std::span<const Index> informed_blocks) {
  config.validate();
  const Index N = a.block_count();
  if (y.size() != a.measurements()) {
    throw DimensionError("sdt: measurement vector has length " + std::to_string(y.size()) + ", operator has " +
                         std::to_string(a.measurements()));
  }
  if (!y.allFinite()) {
    throw ParameterError("sdt: measurement vector contains non-finite values");
  }
  if (s < 0 || s > N) {
    throw ParameterError("sdt: s=" + std::to_string(s) + " outside [0, " + std::to_string(N) + "]");
  }
  if (r < 0 || r > std::min(a.block_rows(), a.block_cols())) {
    throw ParameterError("sdt: rank " + std::to_string(r) + " exceeds the block dimensions");
  }
  std::vector<bool> active(static_cast<std::size_t>(N), true);
  if (mode == DemixMode::informed) {
    std::fill(active.begin(), active.end(), false);
    for (Index b : informed_blocks) {
      if (b < 0 || b >= N) {
        throw ParameterError("sdt: informed block index " + std::to_string(b) + " out of range");
      }
      active[static_cast<std::size_t>(b)] = true;
    }
  }

  const double y_norm = y.norm();
  BlockMatrixSignal x = BlockMatrixSignal::zeros(N, a.block_rows(), a.block_cols(), r, s);
  Eigen::VectorXd resid = y;
  double res_prev = y_norm;
  DemixResult out;
  out.residual_history.push_back(y_norm);
  StopReason reason = StopReason::max_iters;
  Index t = 0;

  while (t < config.max_iters) {
    ++t;
    const BlockMatrixSignal g = a.adjoint_apply(resid);
    const BlockMatrixSignal pg = tangent_project(x, g);
    BlockMatrixSignal z = x;
    for (Index i = 0; i < N; ++i) {
      if (!active[static_cast<std::size_t>(i)]) {
        continue;
      }
      const auto& gi = pg.blocks[static_cast<std::size_t>(i)];
      z.blocks[static_cast<std::size_t>(i)] += sdt_block_step(a, i, gi) * gi;
    }
    switch (mode) {
      case DemixMode::sdt:
        x = demix_threshold(z, s, r);
        break;
      case DemixMode::dt:
        x = rank_project_blocks(z, r);
        break;
      case DemixMode::informed:
        x = rank_project_on_blocks(z, r, informed_blocks);
        break;
    }
    x.rank_bound = r;
    x.block_sparsity = s;
    resid = y - a.apply(x);
    const double res = resid.norm();
    out.residual_history.push_back(res);
    if (res <= config.residual_tol * y_norm || std::abs(res - res_prev) <= config.residual_tol * res_prev) {
      reason = StopReason::residual_tol;
      break;
    }
    res_prev = res;
  }

  out.estimate = std::move(x);
  out.iterations = t;
  out.stop_reason = reason;
  out.converged = reason != StopReason::max_iters;
  return out;
}

}  // namespace hics
