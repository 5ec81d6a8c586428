#include <algorithm>

#include "hics/hibench.hpp"

namespace hics {

template <typename Scalar>
std::vector<Index> numerical_support(const Vec<Scalar>& x, double rel_tol) {
  std::vector<Index> out;
  double peak = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    peak = std::max(peak, std::abs(x[i]));
  }
  if (peak == 0.0) {
    return out;
  }
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > rel_tol * peak) {
      out.push_back(i);
    }
  }
  return out;
}

template <typename Scalar>
TrialRecord evaluate_trial(const Vec<Scalar>& estimate, const Vec<Scalar>& truth, Index block_count, Index block_len,
                           double threshold) {
  if (estimate.size() != truth.size() || block_count * block_len != truth.size()) {
    throw DimensionError("evaluate_trial: estimate, truth and block structure disagree");
  }
  TrialRecord rec;
  rec.l2_error = (estimate - truth).norm();
  const double truth_norm = truth.norm();
  rec.relative_error = truth_norm > 0.0 ? rec.l2_error / truth_norm : rec.l2_error;
  for (Index i = 0; i < block_count; ++i) {
    const auto t = truth.segment(i * block_len, block_len);
    const double dev = (estimate.segment(i * block_len, block_len) - t).norm();
    if (dev >= threshold) {
      continue;
    }
    if (t.isZero(0.0)) {
      ++rec.correct_zero_blocks;
    } else {
      ++rec.correct_nonzero_blocks;
    }
  }
  rec.success = rec.l2_error < threshold;
  rec.support_recovered = numerical_support<Scalar>(estimate) == numerical_support<Scalar>(truth);
  return rec;
}

TrialRecord evaluate_trial(const BlockMatrixSignal& estimate, const BlockMatrixSignal& truth, double threshold) {
  if (!estimate.same_shape(truth)) {
    throw DimensionError("evaluate_trial: estimate and truth shapes differ");
  }
  TrialRecord rec;
  double sum = 0.0;
  double peak = 0.0;
  std::vector<double> est_norms;
  for (Index i = 0; i < truth.block_count(); ++i) {
    const auto& t = truth.blocks[static_cast<std::size_t>(i)];
    const auto& e = estimate.blocks[static_cast<std::size_t>(i)];
    const double dev = (e - t).norm();
    sum += dev * dev;
    if (dev < threshold) {
      if (t.isZero(0.0)) {
        ++rec.correct_zero_blocks;
      } else {
        ++rec.correct_nonzero_blocks;
      }
    }
    est_norms.push_back(e.norm());
    peak = std::max(peak, est_norms.back());
  }
  rec.frobenius_error = std::sqrt(sum);
  rec.l2_error = rec.frobenius_error;
  const double truth_norm = truth.frobenius_norm();
  rec.relative_error = truth_norm > 0.0 ? rec.l2_error / truth_norm : rec.l2_error;
  rec.success = rec.frobenius_error < threshold;
  std::vector<Index> est_blocks;
  for (std::size_t i = 0; i < est_norms.size(); ++i) {
    if (peak > 0.0 && est_norms[i] > 1e-6 * peak) {
      est_blocks.push_back(static_cast<Index>(i));
    }
  }
  rec.support_recovered = est_blocks == truth.nonzero_blocks();
  return rec;
}

template std::vector<Index> numerical_support<double>(const Vec<double>&, double);
template std::vector<Index> numerical_support<cplx>(const Vec<cplx>&, double);
template TrialRecord evaluate_trial<double>(const Vec<double>&, const Vec<double>&, Index, Index, double);
template TrialRecord evaluate_trial<cplx>(const Vec<cplx>&, const Vec<cplx>&, Index, Index, double);

}  // namespace hics
