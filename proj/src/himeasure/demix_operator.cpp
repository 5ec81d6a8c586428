#include "hics/himeasure.hpp"

namespace hics {

GaussianDemixOperator::GaussianDemixOperator(Eigen::MatrixXd matrix, Index block_count, Index block_rows,
                                             Index block_cols)
    : matrix_(std::move(matrix)), block_count_(block_count), block_rows_(block_rows), block_cols_(block_cols) {
  if (block_count < 1 || block_rows < 1 || block_cols < 1) {
    throw DimensionError("GaussianDemixOperator: block dimensions must be positive");
  }
  if (matrix_.cols() != 2 * block_count * block_rows * block_cols) {
    throw DimensionError("GaussianDemixOperator: matrix must have 2 N R C columns");
  }
  if (matrix_.rows() < 1) {
    throw DimensionError("GaussianDemixOperator: at least one measurement is required");
  }
}

Eigen::VectorXd GaussianDemixOperator::embed(const Eigen::MatrixXcd& block) {
  const Index len = block.size();
  Eigen::VectorXd v(2 * len);
  const Eigen::Map<const Eigen::VectorXcd> flat(block.data(), len);
  v.head(len) = flat.real();
  v.tail(len) = flat.imag();
  return v;
}

Eigen::VectorXd GaussianDemixOperator::apply_block(Index i, const Eigen::MatrixXcd& g) const {
  if (i < 0 || i >= block_count_) {
    throw ParameterError("apply_block: block index out of range");
  }
  if (g.rows() != block_rows_ || g.cols() != block_cols_) {
    throw DimensionError("apply_block: block shape mismatch");
  }
  const Index len = 2 * block_rows_ * block_cols_;
  return matrix_.middleCols(i * len, len) * embed(g);
}

Eigen::VectorXd GaussianDemixOperator::apply(const BlockMatrixSignal& x) const {
  if (x.block_count() != block_count_ || x.rows() != block_rows_ || x.cols() != block_cols_) {
    throw DimensionError("GaussianDemixOperator::apply: signal shape mismatch");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(matrix_.rows());
  for (Index i = 0; i < block_count_; ++i) {
    const auto& b = x.blocks[static_cast<std::size_t>(i)];
    if (!b.isZero(0.0)) {
      y += apply_block(i, b);
    }
  }
  return y;
}

BlockMatrixSignal GaussianDemixOperator::adjoint_apply(const Eigen::VectorXd& y) const {
  if (y.size() != matrix_.rows()) {
    throw DimensionError("GaussianDemixOperator::adjoint_apply: measurement length mismatch");
  }
  const Index rc = block_rows_ * block_cols_;
  BlockMatrixSignal out = BlockMatrixSignal::zeros(block_count_, block_rows_, block_cols_, 0, 0);
  for (Index i = 0; i < block_count_; ++i) {
    const Eigen::VectorXd v = matrix_.middleCols(2 * i * rc, 2 * rc).transpose() * y;
    auto& b = out.blocks[static_cast<std::size_t>(i)];
    for (Index k = 0; k < rc; ++k) {
      b.data()[k] = cplx(v[k], v[rc + k]);
    }
  }
  return out;
}

GaussianDemixOperator gaussian_demix_operator(Index m, Index N, Index rows, Index cols, std::uint64_t seed) {
  if (m < 1 || N < 1 || rows < 1 || cols < 1) {
    throw ParameterError("gaussian_demix_operator: dimensions must be >= 1");
  }
  Rng rng(seed);
  Eigen::MatrixXd a = gaussian_matrix<double>(m, 2 * N * rows * cols, rng);
  a /= std::sqrt(static_cast<double>(m));
  return GaussianDemixOperator(std::move(a), N, rows, cols);
}

}  // namespace hics
