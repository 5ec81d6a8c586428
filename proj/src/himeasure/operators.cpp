#include "hics/himeasure.hpp"

namespace hics {

template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// --- MeasurementOperator ----------------------------------------------------

template <typename Scalar>
MeasurementOperator<Scalar>::MeasurementOperator(Index block_count, Index block_len)
    : block_count_(block_count), block_len_(block_len) {
  if (block_count <= 0 || block_len <= 0) {
    throw DimensionError("MeasurementOperator: block count and block length must be positive");
  }
}

template <typename Scalar>
void MeasurementOperator<Scalar>::check_input(const Vec<Scalar>& x) const {
  if (x.size() != cols()) {
    throw DimensionError("apply: input length " + std::to_string(x.size()) + " != " + std::to_string(cols()));
  }
}

template <typename Scalar>
void MeasurementOperator<Scalar>::check_output(const Vec<Scalar>& y) const {
  if (y.size() != rows()) {
    throw DimensionError("adjoint_apply: input length " + std::to_string(y.size()) + " != " + std::to_string(rows()));
  }
}

template <typename Scalar>
Mat<Scalar> MeasurementOperator<Scalar>::columns(std::span<const Index> indices) const {
  Mat<Scalar> out(rows(), static_cast<Index>(indices.size()));
  Vec<Scalar> unit = Vec<Scalar>::Zero(cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index c = indices[k];
    if (c < 0 || c >= cols()) {
      throw ParameterError("columns: index " + std::to_string(c) + " out of range");
    }
    unit[c] = Scalar(1);
    out.col(static_cast<Index>(k)) = apply(unit);
    unit[c] = Scalar(0);
  }
  return out;
}

template <typename Scalar>
Mat<Scalar> MeasurementOperator<Scalar>::to_dense() const {
  std::vector<Index> all(static_cast<std::size_t>(cols()));
  for (Index i = 0; i < cols(); ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  return columns(all);
}

template <typename Scalar>
Mat<Scalar> MeasurementOperator<Scalar>::block_operator(Index i) const {
  if (i < 0 || i >= block_count_) {
    throw ParameterError("block_operator: block index " + std::to_string(i) + " out of range");
  }
  std::vector<Index> idx(static_cast<std::size_t>(block_len_));
  for (Index k = 0; k < block_len_; ++k) {
    idx[static_cast<std::size_t>(k)] = i * block_len_ + k;
  }
  return columns(idx);
}

// --- DenseOperator ------------------------------------------------------------

template <typename Scalar>
DenseOperator<Scalar>::DenseOperator(Mat<Scalar> matrix, Index block_count, Index block_len)
    : MeasurementOperator<Scalar>(block_count, block_len), matrix_(std::move(matrix)) {
  if (matrix_.cols() != block_count * block_len) {
    throw DimensionError("DenseOperator: matrix has " + std::to_string(matrix_.cols()) + " columns, block structure " +
                         std::to_string(block_count) + " x " + std::to_string(block_len));
  }
}

template <typename Scalar>
DenseOperator<Scalar>::DenseOperator(Mat<Scalar> matrix) : DenseOperator(matrix, 1, matrix.cols()) {}

template <typename Scalar>
Vec<Scalar> DenseOperator<Scalar>::apply(const Vec<Scalar>& x) const {
  this->check_input(x);
  return matrix_ * x;
}

template <typename Scalar>
Vec<Scalar> DenseOperator<Scalar>::adjoint_apply(const Vec<Scalar>& y) const {
  this->check_output(y);
  return matrix_.adjoint() * y;
}

template <typename Scalar>
Mat<Scalar> DenseOperator<Scalar>::columns(std::span<const Index> indices) const {
  Mat<Scalar> out(matrix_.rows(), static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= matrix_.cols()) {
      throw ParameterError("columns: index " + std::to_string(indices[k]) + " out of range");
    }
    out.col(static_cast<Index>(k)) = matrix_.col(indices[k]);
  }
  return out;
}

// --- KroneckerOperator ----------------------------------------------------------

template <typename Scalar>
KroneckerOperator<Scalar>::KroneckerOperator(Mat<Scalar> a, Mat<Scalar> b)
    : MeasurementOperator<Scalar>(a.cols(), b.cols()), a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() == 0 || b_.rows() == 0) {
    throw DimensionError("KroneckerOperator: factors need at least one row");
  }
}

template <typename Scalar>
Vec<Scalar> KroneckerOperator<Scalar>::apply(const Vec<Scalar>& x) const {
  this->check_input(x);
  const Eigen::Map<const RowMat<Scalar>> xm(x.data(), a_.cols(), b_.cols());
  RowMat<Scalar> y = a_ * (xm * b_.transpose());
  return Eigen::Map<const Vec<Scalar>>(y.data(), y.size());
}

template <typename Scalar>
Vec<Scalar> KroneckerOperator<Scalar>::adjoint_apply(const Vec<Scalar>& y) const {
  this->check_output(y);
  const Eigen::Map<const RowMat<Scalar>> ym(y.data(), a_.rows(), b_.rows());
  RowMat<Scalar> x = a_.adjoint() * (ym * b_.conjugate());
  return Eigen::Map<const Vec<Scalar>>(x.data(), x.size());
}

template <typename Scalar>
Mat<Scalar> KroneckerOperator<Scalar>::columns(std::span<const Index> indices) const {
  Mat<Scalar> out(rows(), static_cast<Index>(indices.size()));
  const Index n = b_.cols();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index c = indices[k];
    if (c < 0 || c >= this->cols()) {
      throw ParameterError("columns: index " + std::to_string(c) + " out of range");
    }
    const Index i = c / n;
    const Index l = c % n;
    for (Index j = 0; j < a_.rows(); ++j) {
      out.col(static_cast<Index>(k)).segment(j * b_.rows(), b_.rows()) = a_(j, i) * b_.col(l);
    }
  }
  return out;
}

// --- HierarchicalOperator -------------------------------------------------------

template <typename Scalar>
HierarchicalOperator<Scalar>::HierarchicalOperator(Mat<Scalar> mixing, std::vector<Mat<Scalar>> blocks)
    : MeasurementOperator<Scalar>(mixing.cols(), blocks.empty() ? 0 : blocks.front().cols()),
      mixing_(std::move(mixing)),
      blocks_(std::move(blocks)) {
  if (static_cast<Index>(blocks_.size()) != mixing_.cols()) {
    throw DimensionError("HierarchicalOperator: mixing matrix has " + std::to_string(mixing_.cols()) +
                         " columns but " + std::to_string(blocks_.size()) + " block operators were given");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != blocks_.front().rows() || b.cols() != blocks_.front().cols()) {
      throw DimensionError("HierarchicalOperator: block operators must share one shape");
    }
  }
  if (mixing_.rows() == 0 || blocks_.front().rows() == 0) {
    throw DimensionError("HierarchicalOperator: empty output dimension");
  }
}

template <typename Scalar>
Vec<Scalar> HierarchicalOperator<Scalar>::apply(const Vec<Scalar>& x) const {
  this->check_input(x);
  const Index N = mixing_.cols();
  const Index n = this->block_len();
  const Index m = blocks_.front().rows();
  RowMat<Scalar> z(N, m);
  for (Index i = 0; i < N; ++i) {
    z.row(i) = (blocks_[static_cast<std::size_t>(i)] * x.segment(i * n, n)).transpose();
  }
  RowMat<Scalar> y = mixing_ * z;
  return Eigen::Map<const Vec<Scalar>>(y.data(), y.size());
}

template <typename Scalar>
Vec<Scalar> HierarchicalOperator<Scalar>::adjoint_apply(const Vec<Scalar>& y) const {
  this->check_output(y);
  const Index N = mixing_.cols();
  const Index n = this->block_len();
  const Index m = blocks_.front().rows();
  const Eigen::Map<const RowMat<Scalar>> ym(y.data(), mixing_.rows(), m);
  const RowMat<Scalar> z = mixing_.adjoint() * ym;
  Vec<Scalar> x(N * n);
  for (Index i = 0; i < N; ++i) {
    x.segment(i * n, n) = blocks_[static_cast<std::size_t>(i)].adjoint() * z.row(i).transpose();
  }
  return x;
}

template <typename Scalar>
Mat<Scalar> HierarchicalOperator<Scalar>::columns(std::span<const Index> indices) const {
  const Index n = this->block_len();
  const Index m = blocks_.front().rows();
  Mat<Scalar> out(rows(), static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index c = indices[k];
    if (c < 0 || c >= this->cols()) {
      throw ParameterError("columns: index " + std::to_string(c) + " out of range");
    }
    const Index i = c / n;
    const Index l = c % n;
    const auto& b = blocks_[static_cast<std::size_t>(i)];
    for (Index j = 0; j < mixing_.rows(); ++j) {
      out.col(static_cast<Index>(k)).segment(j * m, m) = mixing_(j, i) * b.col(l);
    }
  }
  return out;
}

template <typename Scalar>
Mat<Scalar> HierarchicalOperator<Scalar>::unmixed() const {
  const Index n = this->block_len();
  Mat<Scalar> out(blocks_.front().rows(), this->cols());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    out.middleCols(static_cast<Index>(i) * n, n) = blocks_[i];
  }
  return out;
}

// --- factories ----------------------------------------------------------------

template <typename Scalar>
Mat<Scalar> gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Mat<Scalar> out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = rng.gaussian<Scalar>();
    }
  }
  return out;
}

template <typename Scalar>
DenseOperator<Scalar> gaussian_operator(Index m, Index N, Index n, std::uint64_t seed) {
  if (m < 1 || N < 1 || n < 1) {
    throw ParameterError("gaussian_operator: m, N, n must be >= 1");
  }
  Rng rng(seed);
  Mat<Scalar> a = gaussian_matrix<Scalar>(m, N * n, rng);
  a /= std::sqrt(static_cast<double>(m));
  return DenseOperator<Scalar>(std::move(a), N, n);
}

template <typename Scalar>
KroneckerOperator<Scalar> kronecker_operator(Mat<Scalar> a, Mat<Scalar> b) {
  return KroneckerOperator<Scalar>(std::move(a), std::move(b));
}

template <typename Scalar>
HierarchicalOperator<Scalar> hierarchical_operator(Mat<Scalar> a, std::vector<Mat<Scalar>> blocks) {
  return HierarchicalOperator<Scalar>(std::move(a), std::move(blocks));
}

template <typename Scalar>
Mat<Scalar> kronecker_product(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  Mat<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

#define HICS_INSTANTIATE(S)                                                                         \
  template class MeasurementOperator<S>;                                                            \
  template class DenseOperator<S>;                                                                  \
  template class KroneckerOperator<S>;                                                              \
  template class HierarchicalOperator<S>;                                                           \
  template Mat<S> gaussian_matrix<S>(Index, Index, Rng&);                                           \
  template DenseOperator<S> gaussian_operator<S>(Index, Index, Index, std::uint64_t);               \
  template KroneckerOperator<S> kronecker_operator<S>(Mat<S>, Mat<S>);                              \
  template HierarchicalOperator<S> hierarchical_operator<S>(Mat<S>, std::vector<Mat<S>>);           \
  template Mat<S> kronecker_product<S>(const Mat<S>&, const Mat<S>&);

HICS_INSTANTIATE(double)
HICS_INSTANTIATE(cplx)
#undef HICS_INSTANTIATE

}  // namespace hics
