#include <algorithm>
#include <cmath>
#include <limits>

#include "hics/hisolve.hpp"

namespace hics {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::support_stable:
      return "support_stable";
    case StopReason::residual_tol:
      return "residual_tol";
    case StopReason::max_iters:
      return "max_iters";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (max_iters < 1) {
    throw ParameterError("max_iters must be >= 1");
  }
  if (!(residual_tol >= 0.0) || !(ls_tol >= 0.0)) {
    throw ParameterError("tolerances must be >= 0");
  }
  if (ls_max_iters < 0) {
    throw ParameterError("ls_max_iters must be >= 0");
  }
  if (step.kind == StepPolicy::Kind::constant && !(std::isfinite(step.tau) && step.tau > 0.0)) {
    throw ParameterError("constant step tau must be positive and finite");
  }
}

namespace {

void add_warning(std::vector<std::string>& warnings, const std::string& w) {
  if (!w.empty() && std::find(warnings.begin(), warnings.end(), w) == warnings.end()) {
    warnings.push_back(w);
  }
}

template <typename Scalar>
void check_problem(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, const SparsityModel& model,
                   const SolverConfig& config) {
  config.validate();
  if (y.size() != m.rows()) {
    throw DimensionError("measurement vector has length " + std::to_string(y.size()) + ", operator has " +
                         std::to_string(m.rows()) + " rows");
  }
  if (model.dim() != m.cols()) {
    throw DimensionError("sparsity model dimension " + std::to_string(model.dim()) + " != operator input dimension " +
                         std::to_string(m.cols()));
  }
  if (!y.allFinite()) {
    throw ParameterError("measurement vector contains non-finite values");
  }
}

// Gradient restricted to the nonzero entries of x; the full gradient while
// x is still zero.
template <typename Scalar>
Vec<Scalar> restrict_gradient(const Vec<Scalar>& g, const Vec<Scalar>& x) {
  if (x.isZero(0.0)) {
    return g;
  }
  Vec<Scalar> out = Vec<Scalar>::Zero(g.size());
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != Scalar(0)) {
      out[i] = g[i];
    }
  }
  return out;
}

template <typename Scalar>
double gradient_step(const SolverConfig& config, const MeasurementOperator<Scalar>& m, const Vec<Scalar>& g,
                     const Vec<Scalar>& x, std::vector<std::string>& warnings) {
  if (config.step.kind == StepPolicy::Kind::constant) {
    return config.step.tau;
  }
  bool fell_back = false;
  const double tau = step_size<Scalar>(config.step, restrict_gradient(g, x), m, &fell_back);
  if (fell_back) {
    add_warning(warnings, "adaptive step undefined (zero gradient on support), used tau=1");
  }
  return tau;
}

template <typename Scalar>
SolverResult<Scalar> make_result(const SparsityModel& model, Vec<Scalar> x) {
  SolverResult<Scalar> out;
  const Index len = model.block_len();
  out.estimate = BlockedVector<Scalar>(std::move(x), model.dim() / len, len);
  return out;
}

template <typename Scalar>
HiSupport support_of(const std::vector<Index>& flat, Index block_len) {
  return HiSupport::from_flat(flat, block_len);
}

}  // namespace

template <typename Scalar>
double step_size(const StepPolicy& policy, const Vec<Scalar>& g_support, const MeasurementOperator<Scalar>& m,
                 bool* fell_back) {
  if (fell_back) {
    *fell_back = false;
  }
  if (policy.kind == StepPolicy::Kind::constant) {
    return policy.tau;
  }
  const double num = g_support.squaredNorm();
  const double den = num > 0.0 ? m.apply(g_support).squaredNorm() : 0.0;
  const double tau = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(tau) || tau <= 0.0) {
    if (fell_back) {
      *fell_back = true;
    }
    return 1.0;
  }
  return tau;
}

template <typename Scalar>
SolverResult<Scalar> hi_iht(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, const SparsityModel& model,
                            const SolverConfig& config) {
  check_problem(y, m, model, config);
  const double y_norm = y.norm();
  Vec<Scalar> x = Vec<Scalar>::Zero(m.cols());
  Vec<Scalar> r = y;
  double res_prev = y_norm;
  std::vector<double> history{y_norm};
  std::vector<HiSupport> supports;
  std::vector<std::string> warnings;
  StopReason reason = StopReason::max_iters;
  Index t = 0;

  while (t < config.max_iters) {
    ++t;
    const Vec<Scalar> g = m.adjoint_apply(r);
    const double tau = gradient_step(config, m, g, x, warnings);
    const Vec<Scalar> xbar = x + tau * g;
    const std::vector<Index> keep = model.select(squared_moduli(xbar));
    x = restrict_to_indices<Scalar>(xbar, keep);
    r = y - m.apply(x);
    const double res = r.norm();
    history.push_back(res);
    if (config.record_trace) {
      supports.push_back(support_of<Scalar>(model_support(model, x), model.block_len()));
    }
    if (res <= config.residual_tol * y_norm || std::abs(res - res_prev) <= config.residual_tol * res_prev) {
      reason = StopReason::residual_tol;
      break;
    }
    res_prev = res;
  }

  SolverResult<Scalar> out = make_result<Scalar>(model, std::move(x));
  out.iterations = t;
  out.residual_history = std::move(history);
  out.support_history = std::move(supports);
  out.stop_reason = reason;
  out.converged = reason != StopReason::max_iters;
  out.warnings = std::move(warnings);
  return out;
}

template <typename Scalar>
SolverResult<Scalar> hi_htp(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, const SparsityModel& model,
                            const SolverConfig& config) {
  check_problem(y, m, model, config);
  const double y_norm = y.norm();
  Vec<Scalar> x = Vec<Scalar>::Zero(m.cols());
  Vec<Scalar> r = y;
  double res_prev = y_norm;
  std::vector<double> history{y_norm};
  std::vector<HiSupport> supports;
  std::vector<std::string> warnings;
  std::vector<Index> prev_support;  // I^(0) is empty
  StopReason reason = StopReason::max_iters;
  Index t = 0;

  while (t < config.max_iters) {
    ++t;
    const Vec<Scalar> g = m.adjoint_apply(r);
    const double tau = gradient_step(config, m, g, x, warnings);
    const Vec<Scalar> xbar = x + tau * g;
    std::vector<Index> support = model_support(model, xbar);

    auto ls = least_squares_on_support<Scalar>(y, m, std::span<const Index>(support), config.ls_tol,
                                               config.ls_max_iters);
    add_warning(warnings, ls.warning);
    x = std::move(ls.x);
    r = y - m.apply(x);
    const double res = r.norm();
    history.push_back(res);
    if (config.record_trace) {
      supports.push_back(support_of<Scalar>(support, model.block_len()));
    }
    // Support stabilization is checked first; the residual test only
    // catches stagnation so that an exact hit still ends on a stable support.
    if (support == prev_support) {
      reason = StopReason::support_stable;
      break;
    }
    if (res_prev > 0.0 && std::abs(res - res_prev) <= config.residual_tol * res_prev) {
      reason = StopReason::residual_tol;
      break;
    }
    res_prev = res;
    prev_support = std::move(support);
  }

  SolverResult<Scalar> out = make_result<Scalar>(model, std::move(x));
  out.iterations = t;
  out.residual_history = std::move(history);
  out.support_history = std::move(supports);
  out.stop_reason = reason;
  out.converged = reason != StopReason::max_iters;
  out.warnings = std::move(warnings);
  return out;
}

template <typename Scalar>
SolverResult<Scalar> hi_iht(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index s, Index sigma,
                            const SolverConfig& config) {
  return hi_iht<Scalar>(y, m, HiSparsity(m.block_count(), m.block_len(), s, sigma), config);
}

template <typename Scalar>
SolverResult<Scalar> hi_htp(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index s, Index sigma,
                            const SolverConfig& config) {
  return hi_htp<Scalar>(y, m, HiSparsity(m.block_count(), m.block_len(), s, sigma), config);
}

template <typename Scalar>
SolverResult<Scalar> iht(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index k,
                         const SolverConfig& config) {
  return hi_iht<Scalar>(y, m, HiSparsity(1, m.cols(), 1, k), config);
}

template <typename Scalar>
SolverResult<Scalar> htp(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index k,
                         const SolverConfig& config) {
  return hi_htp<Scalar>(y, m, HiSparsity(1, m.cols(), 1, k), config);
}

#define HICS_INSTANTIATE(S)                                                                                        \
  template double step_size<S>(const StepPolicy&, const Vec<S>&, const MeasurementOperator<S>&, bool*);            \
  template SolverResult<S> hi_iht<S>(const Vec<S>&, const MeasurementOperator<S>&, const SparsityModel&,           \
                                     const SolverConfig&);                                                         \
  template SolverResult<S> hi_htp<S>(const Vec<S>&, const MeasurementOperator<S>&, const SparsityModel&,           \
                                     const SolverConfig&);                                                         \
  template SolverResult<S> hi_iht<S>(const Vec<S>&, const MeasurementOperator<S>&, Index, Index,                  \
                                     const SolverConfig&);                                                         \
  template SolverResult<S> hi_htp<S>(const Vec<S>&, const MeasurementOperator<S>&, Index, Index,                  \
                                     const SolverConfig&);                                                         \
  template SolverResult<S> iht<S>(const Vec<S>&, const MeasurementOperator<S>&, Index, const SolverConfig&);       \
  template SolverResult<S> htp<S>(const Vec<S>&, const MeasurementOperator<S>&, Index, const SolverConfig&);

HICS_INSTANTIATE(double)
HICS_INSTANTIATE(cplx)
#undef HICS_INSTANTIATE

}  // namespace hics
