#include <algorithm>
#include <cmath>
#include <numbers>

#include "hics/himeasure.hpp"

namespace hics {

namespace {

// exp(-2 pi i k / n) for k = 0..n-1; products j*k are reduced mod n before
// lookup so large indices do not lose accuracy.
std::vector<cplx> twiddles(Index n) {
  std::vector<cplx> w(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[static_cast<std::size_t>(k)] = cplx(std::cos(phase), std::sin(phase));
  }
  return w;
}

void check_rows(Index n, std::span<const Index> rows) {
  if (n < 1) {
    throw ParameterError("DFT size must be >= 1");
  }
  if (rows.empty()) {
    throw ParameterError("subsampled DFT needs at least one row");
  }
  for (Index r : rows) {
    if (r < 0 || r >= n) {
      throw ParameterError("DFT row index " + std::to_string(r) + " out of range [0, " + std::to_string(n) + ")");
    }
  }
  std::vector<Index> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParameterError("DFT row indices must be distinct");
  }
}

}  // namespace

Eigen::MatrixXcd dft_matrix(Index n) {
  std::vector<Index> all(static_cast<std::size_t>(std::max<Index>(n, 0)));
  for (Index i = 0; i < n; ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  check_rows(n, all);
  Eigen::MatrixXcd f = subsampled_dft_matrix(n, all);
  return f;
}

Eigen::MatrixXcd subsampled_dft_matrix(Index n, std::span<const Index> rows) {
  check_rows(n, rows);
  const auto w = twiddles(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows.size()));
  Eigen::MatrixXcd f(static_cast<Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index k = 0; k < n; ++k) {
      f(static_cast<Index>(r), k) = scale * w[static_cast<std::size_t>((rows[r] * k) % n)];
    }
  }
  return f;
}

SubsampledFourierOperator::SubsampledFourierOperator(Index n, std::vector<Index> rows)
    : MeasurementOperator<cplx>(1, n), n_(n), rows_(std::move(rows)), scale_(0.0) {
  check_rows(n_, rows_);
  scale_ = 1.0 / std::sqrt(static_cast<double>(rows_.size()));
}

Vec<cplx> SubsampledFourierOperator::apply(const Vec<cplx>& x) const {
  check_input(x);
  const auto w = twiddles(n_);
  Vec<cplx> y(rows());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    cplx acc(0.0, 0.0);
    for (Index k = 0; k < n_; ++k) {
      acc += w[static_cast<std::size_t>((rows_[r] * k) % n_)] * x[k];
    }
    y[static_cast<Index>(r)] = scale_ * acc;
  }
  return y;
}

Vec<cplx> SubsampledFourierOperator::adjoint_apply(const Vec<cplx>& y) const {
  check_output(y);
  const auto w = twiddles(n_);
  Vec<cplx> x = Vec<cplx>::Zero(n_);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const cplx v = scale_ * y[static_cast<Index>(r)];
    for (Index k = 0; k < n_; ++k) {
      x[k] += std::conj(w[static_cast<std::size_t>((rows_[r] * k) % n_)]) * v;
    }
  }
  return x;
}

Eigen::MatrixXcd SubsampledFourierOperator::matrix() const { return subsampled_dft_matrix(n_, rows_); }

SubsampledFourierOperator subsampled_fourier_operator(Index n, std::vector<Index> rows) {
  return SubsampledFourierOperator(n, std::move(rows));
}

SubsampledFourierOperator subsampled_fourier_operator(Index n, Index count, std::uint64_t seed) {
  if (count < 1 || count > n) {
    throw ParameterError("subsampled_fourier_operator: row count must lie in [1, n]");
  }
  Rng rng(seed);
  std::vector<Index> rows = rng.sample_without_replacement(n, count);
  std::sort(rows.begin(), rows.end());
  return SubsampledFourierOperator(n, std::move(rows));
}

}  // namespace hics
