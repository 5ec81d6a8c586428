#include "hics/himeasure.hpp"

namespace hics {

template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace {

template <typename Scalar>
Index codebook_rows(const std::vector<Mat<Scalar>>& codebooks) {
  if (codebooks.empty()) {
    throw DimensionError("LiftedConvolutionOperator: at least one codebook is required");
  }
  return codebooks.front().rows();
}

template <typename Scalar>
Index codebook_cols(const std::vector<Mat<Scalar>>& codebooks) {
  if (codebooks.empty()) {
    throw DimensionError("LiftedConvolutionOperator: at least one codebook is required");
  }
  return codebooks.front().cols();
}

}  // namespace

template <typename Scalar>
LiftedConvolutionOperator<Scalar>::LiftedConvolutionOperator(std::vector<Mat<Scalar>> codebooks)
    : MeasurementOperator<Scalar>(static_cast<Index>(codebooks.size()),
                                  codebook_rows(codebooks) * codebook_cols(codebooks)),
      codebooks_(std::move(codebooks)),
      signal_len_(codebooks_.front().rows()),
      message_len_(codebooks_.front().cols()) {
  for (const auto& b : codebooks_) {
    if (b.rows() != signal_len_ || b.cols() != message_len_) {
      throw DimensionError("LiftedConvolutionOperator: all codebooks must be N x E with the same N, E");
    }
  }
}

template <typename Scalar>
Vec<Scalar> LiftedConvolutionOperator<Scalar>::apply(const Vec<Scalar>& x) const {
  this->check_input(x);
  const Index N = signal_len_;
  const Index E = message_len_;
  Vec<Scalar> y = Vec<Scalar>::Zero(N);
  for (Index p = 0; p < users(); ++p) {
    const Eigen::Map<const RowMat<Scalar>> w(x.data() + p * E * N, E, N);
    if (w.isZero(0.0)) {
      continue;
    }
    // Z[:, j] is the codeword carrying shift j; fold it back with the shift.
    const Mat<Scalar> z = codebooks_[static_cast<std::size_t>(p)] * w;
    for (Index j = 0; j < N; ++j) {
      for (Index i = 0; i < N; ++i) {
        y[(i + j) % N] += z(i, j);
      }
    }
  }
  return y;
}

template <typename Scalar>
Vec<Scalar> LiftedConvolutionOperator<Scalar>::adjoint_apply(const Vec<Scalar>& y) const {
  this->check_output(y);
  const Index N = signal_len_;
  const Index E = message_len_;
  Mat<Scalar> shifted(N, N);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) {
      shifted(i, j) = y[(i + j) % N];
    }
  }
  Vec<Scalar> x(this->cols());
  for (Index p = 0; p < users(); ++p) {
    RowMat<Scalar> w = codebooks_[static_cast<std::size_t>(p)].adjoint() * shifted;
    x.segment(p * E * N, E * N) = Eigen::Map<const Vec<Scalar>>(w.data(), w.size());
  }
  return x;
}

template <typename Scalar>
Mat<Scalar> LiftedConvolutionOperator<Scalar>::columns(std::span<const Index> indices) const {
  const Index N = signal_len_;
  const Index E = message_len_;
  Mat<Scalar> out(N, static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index c = indices[k];
    if (c < 0 || c >= this->cols()) {
      throw ParameterError("columns: index " + std::to_string(c) + " out of range");
    }
    const Index p = c / (E * N);
    const Index e = (c / N) % E;
    const Index j = c % N;
    const auto& b = codebooks_[static_cast<std::size_t>(p)];
    for (Index i = 0; i < N; ++i) {
      out((i + j) % N, static_cast<Index>(k)) = b(i, e);
    }
  }
  return out;
}

template <typename Scalar>
Vec<Scalar> LiftedConvolutionOperator<Scalar>::lift(const std::vector<Mat<Scalar>>& w) const {
  if (static_cast<Index>(w.size()) != users()) {
    throw DimensionError("lift: expected one matrix per user");
  }
  const Index N = signal_len_;
  const Index E = message_len_;
  Vec<Scalar> x(this->cols());
  for (Index p = 0; p < users(); ++p) {
    const auto& wp = w[static_cast<std::size_t>(p)];
    if (wp.rows() != E || wp.cols() != N) {
      throw DimensionError("lift: user matrices must be E x N");
    }
    RowMat<Scalar> r = wp;
    x.segment(p * E * N, E * N) = Eigen::Map<const Vec<Scalar>>(r.data(), r.size());
  }
  return x;
}

template <typename Scalar>
std::vector<Mat<Scalar>> LiftedConvolutionOperator<Scalar>::unlift(const Vec<Scalar>& x) const {
  this->check_input(x);
  const Index N = signal_len_;
  const Index E = message_len_;
  std::vector<Mat<Scalar>> w;
  w.reserve(static_cast<std::size_t>(users()));
  for (Index p = 0; p < users(); ++p) {
    w.emplace_back(Eigen::Map<const RowMat<Scalar>>(x.data() + p * E * N, E, N));
  }
  return w;
}

template <typename Scalar>
Vec<Scalar> circular_convolution(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("circular_convolution: lengths differ");
  }
  const Index N = a.size();
  Vec<Scalar> out = Vec<Scalar>::Zero(N);
  for (Index k = 0; k < N; ++k) {
    for (Index j = 0; j < N; ++j) {
      out[k] += a[j] * b[((k - j) % N + N) % N];
    }
  }
  return out;
}

template <typename Scalar>
LiftedConvolutionOperator<Scalar> lifted_convolution_operator(std::vector<Mat<Scalar>> codebooks) {
  return LiftedConvolutionOperator<Scalar>(std::move(codebooks));
}

template class LiftedConvolutionOperator<double>;
template class LiftedConvolutionOperator<cplx>;
template Vec<double> circular_convolution<double>(const Vec<double>&, const Vec<double>&);
template Vec<cplx> circular_convolution<cplx>(const Vec<cplx>&, const Vec<cplx>&);
template LiftedConvolutionOperator<double> lifted_convolution_operator<double>(std::vector<Mat<double>>);
template LiftedConvolutionOperator<cplx> lifted_convolution_operator<cplx>(std::vector<Mat<cplx>>);

}  // namespace hics
