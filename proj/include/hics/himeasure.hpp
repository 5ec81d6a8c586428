#pragma once

// Linear measurement operators on blocked vectors. Every realization keeps
// the block structure (N, n) of its input space so that hierarchical
// analysis (block operators, HiRIP) can be run on it directly.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hics/hisignal.hpp"
#include "hics/rng.hpp"
#include "hics/types.hpp"

namespace hics {

template <typename Scalar>
class MeasurementOperator {
 public:
  virtual ~MeasurementOperator() = default;

  /// Output dimension m.
  virtual Index rows() const = 0;
  /// Input dimension N * n.
  Index cols() const { return block_count_ * block_len_; }
  Index block_count() const { return block_count_; }
  Index block_len() const { return block_len_; }

  virtual Vec<Scalar> apply(const Vec<Scalar>& x) const = 0;
  virtual Vec<Scalar> adjoint_apply(const Vec<Scalar>& y) const = 0;

  /// Selected columns as a dense m x |indices| matrix. The default applies
  /// the operator to unit vectors.
  virtual Mat<Scalar> columns(std::span<const Index> indices) const;

  Mat<Scalar> to_dense() const;

  /// Block operator A_i(v) = A(e_i (x) v), an m x n matrix.
  Mat<Scalar> block_operator(Index i) const;

 protected:
  MeasurementOperator(Index block_count, Index block_len);

  void check_input(const Vec<Scalar>& x) const;
  void check_output(const Vec<Scalar>& y) const;

 private:
  Index block_count_;
  Index block_len_;
};

/// Explicit m x (N n) matrix.
template <typename Scalar>
class DenseOperator final : public MeasurementOperator<Scalar> {
 public:
  DenseOperator(Mat<Scalar> matrix, Index block_count, Index block_len);
  /// Single-block view of the matrix.
  explicit DenseOperator(Mat<Scalar> matrix);

  Index rows() const override { return matrix_.rows(); }
  Vec<Scalar> apply(const Vec<Scalar>& x) const override;
  Vec<Scalar> adjoint_apply(const Vec<Scalar>& y) const override;
  Mat<Scalar> columns(std::span<const Index> indices) const override;

  const Mat<Scalar>& matrix() const { return matrix_; }

 private:
  Mat<Scalar> matrix_;
};

/// A (x) B applied as A X B^T on the N x n reshaping of x (row i = block i).
/// The output is the row-major vectorization of the M x m result.
template <typename Scalar>
class KroneckerOperator final : public MeasurementOperator<Scalar> {
 public:
  KroneckerOperator(Mat<Scalar> a, Mat<Scalar> b);

  Index rows() const override { return a_.rows() * b_.rows(); }
  Vec<Scalar> apply(const Vec<Scalar>& x) const override;
  Vec<Scalar> adjoint_apply(const Vec<Scalar>& y) const override;
  Mat<Scalar> columns(std::span<const Index> indices) const override;

  const Mat<Scalar>& a() const { return a_; }
  const Mat<Scalar>& b() const { return b_; }

 private:
  Mat<Scalar> a_;
  Mat<Scalar> b_;
};

/// x -> sum_i a_i (x) B_i x_i with a_i the columns of the M x N mixing
/// matrix and B_i the m x n block maps.
template <typename Scalar>
class HierarchicalOperator final : public MeasurementOperator<Scalar> {
 public:
  HierarchicalOperator(Mat<Scalar> mixing, std::vector<Mat<Scalar>> blocks);

  Index rows() const override { return mixing_.rows() * blocks_.front().rows(); }
  Vec<Scalar> apply(const Vec<Scalar>& x) const override;
  Vec<Scalar> adjoint_apply(const Vec<Scalar>& y) const override;
  Mat<Scalar> columns(std::span<const Index> indices) const override;

  const Mat<Scalar>& mixing() const { return mixing_; }
  const std::vector<Mat<Scalar>>& blocks() const { return blocks_; }

  /// The unmixed map x -> sum_i B_i x_i as an m x (N n) matrix.
  Mat<Scalar> unmixed() const;

 private:
  Mat<Scalar> mixing_;
  std::vector<Mat<Scalar>> blocks_;
};

/// Unitary DFT matrix, F[j, k] = exp(-2 pi i j k / n) / sqrt(n).
Eigen::MatrixXcd dft_matrix(Index n);

/// Rows of the unitary DFT scaled by sqrt(n / |rows|).
Eigen::MatrixXcd subsampled_dft_matrix(Index n, std::span<const Index> rows);

/// Row subsampled unitary DFT on C^n (single block), scaled by
/// sqrt(n / |rows|). Evaluated directly in O(n |rows|).
class SubsampledFourierOperator final : public MeasurementOperator<cplx> {
 public:
  SubsampledFourierOperator(Index n, std::vector<Index> rows);

  Index rows() const override { return static_cast<Index>(rows_.size()); }
  Vec<cplx> apply(const Vec<cplx>& x) const override;
  Vec<cplx> adjoint_apply(const Vec<cplx>& y) const override;

  const std::vector<Index>& sampled_rows() const { return rows_; }
  Eigen::MatrixXcd matrix() const;

 private:
  Index n_;
  std::vector<Index> rows_;
  double scale_;
};

/// Lifted multi-user circular convolution. Input: N_d blocks, block p holds
/// W_p in K^{E x N} row-major (entry (e, j) at p*E*N + e*N + j). Output in
/// K^N:  y = sum_p conv_p(W_p),  conv_p(c h^T) = h (*) (B_p c), with (*) the
/// circular convolution modulo N.
template <typename Scalar>
class LiftedConvolutionOperator final : public MeasurementOperator<Scalar> {
 public:
  explicit LiftedConvolutionOperator(std::vector<Mat<Scalar>> codebooks);

  Index rows() const override { return signal_len_; }
  Vec<Scalar> apply(const Vec<Scalar>& x) const override;
  Vec<Scalar> adjoint_apply(const Vec<Scalar>& y) const override;
  Mat<Scalar> columns(std::span<const Index> indices) const override;

  Index users() const { return static_cast<Index>(codebooks_.size()); }
  Index message_len() const { return message_len_; }
  Index signal_len() const { return signal_len_; }
  const std::vector<Mat<Scalar>>& codebooks() const { return codebooks_; }

  /// Flatten per-user E x N matrices into the operator's input layout.
  Vec<Scalar> lift(const std::vector<Mat<Scalar>>& w) const;
  std::vector<Mat<Scalar>> unlift(const Vec<Scalar>& x) const;

 private:
  std::vector<Mat<Scalar>> codebooks_;
  Index signal_len_;
  Index message_len_;
};

/// Circular convolution (a (*) b)[k] = sum_j a[j] b[(k - j) mod N], direct O(N^2).
template <typename Scalar>
Vec<Scalar> circular_convolution(const Vec<Scalar>& a, const Vec<Scalar>& b);

// --- factories -------------------------------------------------------------

/// i.i.d. Gaussian entries scaled by 1/sqrt(m). Complex entries have
/// independent N(0, 1/2) parts. Entries are drawn row by row.
template <typename Scalar>
DenseOperator<Scalar> gaussian_operator(Index m, Index N, Index n, std::uint64_t seed);

/// m x k Gaussian matrix with the same conventions (no 1/sqrt(m) scaling).
template <typename Scalar>
Mat<Scalar> gaussian_matrix(Index rows, Index cols, Rng& rng);

template <typename Scalar>
KroneckerOperator<Scalar> kronecker_operator(Mat<Scalar> a, Mat<Scalar> b);

template <typename Scalar>
HierarchicalOperator<Scalar> hierarchical_operator(Mat<Scalar> a, std::vector<Mat<Scalar>> blocks);

SubsampledFourierOperator subsampled_fourier_operator(Index n, std::vector<Index> rows);
/// `count` rows drawn uniformly without replacement, then sorted.
SubsampledFourierOperator subsampled_fourier_operator(Index n, Index count, std::uint64_t seed);

template <typename Scalar>
LiftedConvolutionOperator<Scalar> lifted_convolution_operator(std::vector<Mat<Scalar>> codebooks);

/// Dense Kronecker product in the block convention [a_ij B].
template <typename Scalar>
Mat<Scalar> kronecker_product(const Mat<Scalar>& a, const Mat<Scalar>& b);

// --- block matrix (de-mixing) measurements ---------------------------------

/// Linear map from BlockMatrixSignal to real measurements.
class DemixOperator {
 public:
  virtual ~DemixOperator() = default;

  virtual Index measurements() const = 0;
  virtual Index block_count() const = 0;
  virtual Index block_rows() const = 0;
  virtual Index block_cols() const = 0;

  virtual Eigen::VectorXd apply(const BlockMatrixSignal& x) const = 0;
  virtual BlockMatrixSignal adjoint_apply(const Eigen::VectorXd& y) const = 0;
  /// A(e_i (x) g): the contribution of a single block.
  virtual Eigen::VectorXd apply_block(Index i, const Eigen::MatrixXcd& g) const = 0;
};

/// Real Gaussian functionals on the real embedding of the complex signal.
/// Block i occupies columns [2 i R C, 2 (i+1) R C) of the m x (2 N R C)
/// matrix: first the real parts, then the imaginary parts, each column-major.
class GaussianDemixOperator final : public DemixOperator {
 public:
  GaussianDemixOperator(Eigen::MatrixXd matrix, Index block_count, Index block_rows, Index block_cols);

  Index measurements() const override { return matrix_.rows(); }
  Index block_count() const override { return block_count_; }
  Index block_rows() const override { return block_rows_; }
  Index block_cols() const override { return block_cols_; }

  Eigen::VectorXd apply(const BlockMatrixSignal& x) const override;
  BlockMatrixSignal adjoint_apply(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd apply_block(Index i, const Eigen::MatrixXcd& g) const override;

  const Eigen::MatrixXd& matrix() const { return matrix_; }

  /// Real embedding of one block (length 2 R C).
  static Eigen::VectorXd embed(const Eigen::MatrixXcd& block);

 private:
  Eigen::MatrixXd matrix_;
  Index block_count_;
  Index block_rows_;
  Index block_cols_;
};

/// m Gaussian functionals scaled by 1/sqrt(m).
GaussianDemixOperator gaussian_demix_operator(Index m, Index N, Index rows, Index cols, std::uint64_t seed);

}  // namespace hics
