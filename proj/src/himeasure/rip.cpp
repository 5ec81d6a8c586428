#include <Eigen/Eigenvalues>
#include <algorithm>

#include "combinations.hpp"
#include "hics/rip.hpp"

namespace hics {

const char* to_string(RipKind kind) {
  switch (kind) {
    case RipKind::exact:
      return "exact";
    case RipKind::monte_carlo_lower_bound:
      return "monte_carlo_lower_bound";
    case RipKind::coherence_upper_bound:
      return "coherence_upper_bound";
    case RipKind::inherited_upper_bound:
      return "inherited_upper_bound";
    case RipKind::incoherent_blocks_upper_bound:
      return "incoherent_blocks_upper_bound";
  }
  return "unknown";
}

namespace {

void check_hi_params(Index cols, Index N, Index n, Index s, Index sigma) {
  if (N < 1 || n < 1 || N * n != cols) {
    throw DimensionError("block structure " + std::to_string(N) + "x" + std::to_string(n) + " does not match " +
                         std::to_string(cols) + " columns");
  }
  if (s < 0 || s > N) {
    throw ParameterError("s=" + std::to_string(s) + " outside [0, " + std::to_string(N) + "]");
  }
  if (sigma < 0 || sigma > n) {
    throw ParameterError("sigma=" + std::to_string(sigma) + " outside [0, " + std::to_string(n) + "]");
  }
}

template <typename Scalar>
double gram_rip_constant(const Mat<Scalar>& gram, std::span<const Index> idx, Mat<Scalar>& scratch) {
  const auto k = static_cast<Index>(idx.size());
  if (k == 0) {
    return 0.0;
  }
  scratch.resize(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      scratch(i, j) = gram(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(scratch, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return std::max(ev.maxCoeff() - 1.0, 1.0 - ev.minCoeff());
}

template <typename Scalar>
Mat<Scalar> dense_of(const MeasurementOperator<Scalar>& op) {
  if (const auto* d = dynamic_cast<const DenseOperator<Scalar>*>(&op)) {
    return d->matrix();
  }
  return op.to_dense();
}

}  // namespace

template <typename Scalar>
double support_rip_constant(const Mat<Scalar>& a, std::span<const Index> columns) {
  Mat<Scalar> sub(a.rows(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    sub.col(static_cast<Index>(k)) = a.col(columns[k]);
  }
  const Mat<Scalar> gram = sub.adjoint() * sub;
  std::vector<Index> all(columns.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    all[k] = static_cast<Index>(k);
  }
  Mat<Scalar> scratch;
  return gram_rip_constant<Scalar>(gram, all, scratch);
}

template <typename Scalar>
RipReport exact_hirip(const Mat<Scalar>& a, Index N, Index n, Index s, Index sigma, double budget) {
  check_hi_params(a.cols(), N, n, s, sigma);
  const double count = hi_support_count(N, n, s, sigma);
  if (count > budget) {
    throw BudgetError(count, budget);
  }
  RipReport report;
  report.kind = RipKind::exact;
  report.s = s;
  report.sigma = sigma;
  if (s == 0 || sigma == 0) {
    report.supports_examined = 1;
    return report;
  }

  const Mat<Scalar> gram = a.adjoint() * a;
  const auto block_sets = detail::combinations(N, s);
  const auto entry_sets = detail::combinations(n, sigma);
  const auto radix = entry_sets.size();
  std::vector<std::size_t> digit(static_cast<std::size_t>(s));
  std::vector<Index> idx(static_cast<std::size_t>(s * sigma));
  Mat<Scalar> scratch;
  double best = 0.0;
  std::uint64_t examined = 0;

  for (const auto& blocks : block_sets) {
    std::fill(digit.begin(), digit.end(), 0);
    while (true) {
      for (Index b = 0; b < s; ++b) {
        const auto& entries = entry_sets[digit[static_cast<std::size_t>(b)]];
        for (Index e = 0; e < sigma; ++e) {
          idx[static_cast<std::size_t>(b * sigma + e)] = blocks[static_cast<std::size_t>(b)] * n + entries[static_cast<std::size_t>(e)];
        }
      }
      best = std::max(best, gram_rip_constant<Scalar>(gram, idx, scratch));
      ++examined;

      Index pos = s - 1;
      while (pos >= 0 && ++digit[static_cast<std::size_t>(pos)] == radix) {
        digit[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) {
        break;
      }
    }
  }
  report.delta = best;
  report.supports_examined = examined;
  return report;
}

template <typename Scalar>
RipReport exact_hirip(const MeasurementOperator<Scalar>& op, Index s, Index sigma, double budget) {
  check_hi_params(op.cols(), op.block_count(), op.block_len(), s, sigma);
  const double count = hi_support_count(op.block_count(), op.block_len(), s, sigma);
  if (count > budget) {
    throw BudgetError(count, budget);
  }
  return exact_hirip<Scalar>(dense_of(op), op.block_count(), op.block_len(), s, sigma, budget);
}

template <typename Scalar>
RipReport exact_rip(const Mat<Scalar>& a, Index k, double budget) {
  RipReport r = exact_hirip<Scalar>(a, a.cols(), 1, k, k == 0 ? 0 : 1, budget);
  r.s = k;
  r.sigma = 1;
  r.flat = true;
  return r;
}

template <typename Scalar>
RipReport exact_rip(const MeasurementOperator<Scalar>& op, Index k, double budget) {
  if (k < 0 || k > op.cols()) {
    throw ParameterError("k=" + std::to_string(k) + " outside [0, " + std::to_string(op.cols()) + "]");
  }
  const double count = binomial(op.cols(), k);
  if (count > budget) {
    throw BudgetError(count, budget);
  }
  return exact_rip<Scalar>(dense_of(op), k, budget);
}

template <typename Scalar>
RipReport mc_hirip_lower_bound(const Mat<Scalar>& a, Index N, Index n, Index s, Index sigma, Index trials,
                               std::uint64_t seed) {
  check_hi_params(a.cols(), N, n, s, sigma);
  if (trials < 1) {
    throw ParameterError("mc_hirip_lower_bound: trials must be >= 1");
  }
  RipReport report;
  report.kind = RipKind::monte_carlo_lower_bound;
  report.s = s;
  report.sigma = sigma;
  report.supports_examined = static_cast<std::uint64_t>(trials);
  if (s == 0 || sigma == 0) {
    return report;
  }
  Rng rng(seed);
  std::vector<Index> idx;
  for (Index t = 0; t < trials; ++t) {
    idx.clear();
    auto blocks = rng.sample_without_replacement(N, s);
    std::sort(blocks.begin(), blocks.end());
    for (Index b : blocks) {
      auto entries = rng.sample_without_replacement(n, sigma);
      std::sort(entries.begin(), entries.end());
      for (Index e : entries) {
        idx.push_back(b * n + e);
      }
    }
    report.delta = std::max(report.delta, support_rip_constant<Scalar>(a, idx));
  }
  return report;
}

template <typename Scalar>
RipReport mc_hirip_lower_bound(const MeasurementOperator<Scalar>& op, Index s, Index sigma, Index trials,
                               std::uint64_t seed) {
  return mc_hirip_lower_bound<Scalar>(dense_of(op), op.block_count(), op.block_len(), s, sigma, trials, seed);
}

template <typename Scalar>
RipReport coherence_hirip_bound(const MeasurementOperator<Scalar>& op, Index s, Index sigma,
                                CoherenceVariant variant, double budget) {
  check_hi_params(op.cols(), op.block_count(), op.block_len(), s, sigma);
  std::vector<Mat<Scalar>> blocks;
  for (Index i = 0; i < op.block_count(); ++i) {
    blocks.push_back(op.block_operator(i));
  }
  RipReport report;
  report.kind = RipKind::coherence_upper_bound;
  report.s = s;
  report.sigma = sigma;

  const double mu_block = s > 1 ? sparse_block_coherence<Scalar>(blocks, sigma, budget) : 0.0;
  report.constituents["mu_block"] = mu_block;
  double diag = 0.0;
  if (variant == CoherenceVariant::block_rip) {
    report.variant = "block_rip";
    for (const auto& b : blocks) {
      const RipReport r = exact_rip<Scalar>(b, sigma, budget);
      diag = std::max(diag, r.delta);
      report.supports_examined += r.supports_examined;
    }
    report.constituents["sup_delta_sigma_blocks"] = diag;
  } else {
    report.variant = "normalized";
    CoherenceValue nu;
    for (const auto& b : blocks) {
      const CoherenceValue c = mutual_coherence<Scalar>(b);
      nu.value = std::max(nu.value, c.value);
      nu.renormalized = nu.renormalized || c.renormalized;
    }
    if (nu.renormalized) {
      throw ParameterError("coherence_hirip_bound: the normalized variant needs unit-norm columns");
    }
    report.constituents["sub_coherence"] = nu.value;
    diag = static_cast<double>(sigma - 1) * nu.value;
  }
  report.delta = diag + static_cast<double>(std::max<Index>(s - 1, 0)) * mu_block;
  return report;
}

namespace {

template <typename Scalar>
RipReport inherited_from(const Mat<Scalar>& mixing, const std::vector<Mat<Scalar>>& blocks, Index s, Index sigma,
                         double budget) {
  const RipReport ra = exact_rip<Scalar>(mixing, s, budget);
  double db = 0.0;
  std::uint64_t examined = ra.supports_examined;
  for (const auto& b : blocks) {
    const RipReport rb = exact_rip<Scalar>(b, sigma, budget);
    db = std::max(db, rb.delta);
    examined += rb.supports_examined;
  }
  RipReport report;
  report.kind = RipKind::inherited_upper_bound;
  report.s = s;
  report.sigma = sigma;
  report.variant = "inherited";
  report.supports_examined = examined;
  report.constituents["delta_s_mixing"] = ra.delta;
  report.constituents["sup_delta_sigma_blocks"] = db;
  report.delta = ra.delta + db + ra.delta * db;
  return report;
}

}  // namespace

template <typename Scalar>
RipReport inherited_hirip_bound(const HierarchicalOperator<Scalar>& h, Index s, Index sigma, double budget) {
  check_hi_params(h.cols(), h.block_count(), h.block_len(), s, sigma);
  return inherited_from<Scalar>(h.mixing(), h.blocks(), s, sigma, budget);
}

template <typename Scalar>
RipReport inherited_hirip_bound(const KroneckerOperator<Scalar>& h, Index s, Index sigma, double budget) {
  check_hi_params(h.cols(), h.block_count(), h.block_len(), s, sigma);
  return inherited_from<Scalar>(h.a(), {h.b()}, s, sigma, budget);
}

template <typename Scalar>
RipReport incoherent_blocks_bound(const HierarchicalOperator<Scalar>& h, Index s, Index sigma, Index t,
                                  double budget) {
  const Index N = h.block_count();
  const Index n = h.block_len();
  if (t < 1 || s < 1 || t * s > N) {
    throw ParameterError("incoherent_blocks_bound: need t >= 1, s >= 1 and t*s <= N");
  }
  if (2 * s > N || 2 * sigma > n) {
    throw ParameterError("incoherent_blocks_bound: need 2s <= N and 2 sigma <= n");
  }
  check_hi_params(h.cols(), N, n, s, sigma);

  RipReport report = inherited_from<Scalar>(h.mixing(), h.blocks(), s, sigma, budget);
  const RipReport r2 = exact_rip<Scalar>(h.mixing(), 2 * s, budget);
  const double mu = sparse_block_coherence<Scalar>(h.blocks(), 2 * sigma, budget);
  const double ds = report.constituents["delta_s_mixing"];
  const double db = report.constituents["sup_delta_sigma_blocks"];

  report.kind = RipKind::incoherent_blocks_upper_bound;
  report.variant = "incoherent_blocks";
  report.s = t * s;
  report.supports_examined += r2.supports_examined;
  report.constituents["t"] = static_cast<double>(t);
  report.constituents["delta_2s_mixing"] = r2.delta;
  report.constituents["mu_block_2sigma_unmixed"] = mu;
  // The delta_s(A) term is kept: without it the bound fails already for
  // t = 1 with isometric blocks.
  report.delta = db + ds * (1.0 + db) + static_cast<double>(t) * std::sqrt(static_cast<double>(s)) * r2.delta * mu;
  return report;
}

bool rip_chain_holds(const RipReport& lower, const RipReport& exact, const RipReport& upper, double slack) {
  return lower.delta <= exact.delta + slack && exact.delta <= upper.delta + slack;
}

#define HICS_INSTANTIATE(S)                                                                                       \
  template double support_rip_constant<S>(const Mat<S>&, std::span<const Index>);                                 \
  template RipReport exact_hirip<S>(const Mat<S>&, Index, Index, Index, Index, double);                           \
  template RipReport exact_hirip<S>(const MeasurementOperator<S>&, Index, Index, double);                         \
  template RipReport exact_rip<S>(const Mat<S>&, Index, double);                                                  \
  template RipReport exact_rip<S>(const MeasurementOperator<S>&, Index, double);                                  \
  template RipReport mc_hirip_lower_bound<S>(const Mat<S>&, Index, Index, Index, Index, Index, std::uint64_t);    \
  template RipReport mc_hirip_lower_bound<S>(const MeasurementOperator<S>&, Index, Index, Index, std::uint64_t);  \
  template RipReport coherence_hirip_bound<S>(const MeasurementOperator<S>&, Index, Index, CoherenceVariant,      \
                                              double);                                                            \
  template RipReport inherited_hirip_bound<S>(const HierarchicalOperator<S>&, Index, Index, double);              \
  template RipReport inherited_hirip_bound<S>(const KroneckerOperator<S>&, Index, Index, double);                 \
  template RipReport incoherent_blocks_bound<S>(const HierarchicalOperator<S>&, Index, Index, Index, double);

HICS_INSTANTIATE(double)
HICS_INSTANTIATE(cplx)
#undef HICS_INSTANTIATE

}  // namespace hics
