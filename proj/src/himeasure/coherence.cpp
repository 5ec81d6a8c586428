#include <Eigen/Eigenvalues>

#include "combinations.hpp"
#include "hics/rip.hpp"

namespace hics {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) {
    return 0.0;
  }
  k = std::min(k, n - k);
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(out);
}

double hi_support_count(Index N, Index n, Index s, Index sigma) {
  return binomial(N, s) * std::pow(binomial(n, sigma), static_cast<double>(s));
}

template <typename Scalar>
CoherenceValue mutual_coherence(const Mat<Scalar>& a) {
  CoherenceValue out;
  Mat<Scalar> cols = a;
  for (Index j = 0; j < cols.cols(); ++j) {
    const double norm = cols.col(j).norm();
    if (norm == 0.0) {
      throw ParameterError("mutual_coherence: column " + std::to_string(j) + " is zero");
    }
    if (std::abs(norm - 1.0) > 1e-8) {
      out.renormalized = true;
    }
    cols.col(j) /= norm;
  }
  const Mat<Scalar> gram = cols.adjoint() * cols;
  for (Index i = 0; i < gram.rows(); ++i) {
    for (Index j = i + 1; j < gram.cols(); ++j) {
      out.value = std::max(out.value, std::abs(gram(i, j)));
    }
  }
  return out;
}

template <typename Scalar>
double sparse_singular_value(const Mat<Scalar>& b, Index sigma, double budget) {
  if (sigma < 0 || sigma > b.rows() || sigma > b.cols()) {
    throw ParameterError("sparse_singular_value: sigma=" + std::to_string(sigma) + " exceeds a dimension of the " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " matrix");
  }
  if (sigma == 0) {
    return 0.0;
  }
  const double count = binomial(b.rows(), sigma) * binomial(b.cols(), sigma);
  if (count > budget) {
    throw BudgetError(count, budget);
  }
  const auto row_sets = detail::combinations(b.rows(), sigma);
  const auto col_sets = detail::combinations(b.cols(), sigma);
  double best = 0.0;
  Mat<Scalar> sub(sigma, sigma);
  for (const auto& rows : row_sets) {
    for (const auto& cols : col_sets) {
      for (Index i = 0; i < sigma; ++i) {
        for (Index j = 0; j < sigma; ++j) {
          sub(i, j) = b(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
        }
      }
      double top = 0.0;
      if (sigma == 1) {
        top = std::abs(sub(0, 0));
      } else {
        const Mat<Scalar> g = sub.adjoint() * sub;
        Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(g, Eigen::EigenvaluesOnly);
        top = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
      }
      best = std::max(best, top);
    }
  }
  return best;
}

template <typename Scalar>
CoherenceValue sub_coherence(const MeasurementOperator<Scalar>& op) {
  CoherenceValue out;
  for (Index i = 0; i < op.block_count(); ++i) {
    const CoherenceValue c = mutual_coherence<Scalar>(op.block_operator(i));
    out.value = std::max(out.value, c.value);
    out.renormalized = out.renormalized || c.renormalized;
  }
  return out;
}

template <typename Scalar>
double sparse_block_coherence(const std::vector<Mat<Scalar>>& blocks, Index sigma, double budget) {
  double best = 0.0;
  // rho(A_j^* A_i) = rho(A_i^* A_j), so unordered pairs suffice.
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      const Mat<Scalar> cross = blocks[i].adjoint() * blocks[j];
      best = std::max(best, sparse_singular_value<Scalar>(cross, sigma, budget));
    }
  }
  return best;
}

template <typename Scalar>
double sparse_block_coherence(const MeasurementOperator<Scalar>& op, Index sigma, double budget) {
  std::vector<Mat<Scalar>> blocks;
  for (Index i = 0; i < op.block_count(); ++i) {
    blocks.push_back(op.block_operator(i));
  }
  return sparse_block_coherence(blocks, sigma, budget);
}

#define HICS_INSTANTIATE(S)                                                                    \
  template CoherenceValue mutual_coherence<S>(const Mat<S>&);                                  \
  template double sparse_singular_value<S>(const Mat<S>&, Index, double);                      \
  template CoherenceValue sub_coherence<S>(const MeasurementOperator<S>&);                     \
  template double sparse_block_coherence<S>(const std::vector<Mat<S>>&, Index, double);        \
  template double sparse_block_coherence<S>(const MeasurementOperator<S>&, Index, double);

HICS_INSTANTIATE(double)
HICS_INSTANTIATE(cplx)
#undef HICS_INSTANTIATE

}  // namespace hics
