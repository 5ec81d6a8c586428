#include <Eigen/SVD>

#include "hics/hisignal.hpp"

namespace hics {

BlockMatrixSignal BlockMatrixSignal::zeros(Index block_count, Index rows, Index cols, Index rank_bound,
                                           Index block_sparsity) {
  BlockMatrixSignal out;
  out.blocks.assign(static_cast<std::size_t>(block_count), Eigen::MatrixXcd::Zero(rows, cols));
  out.rank_bound = rank_bound;
  out.block_sparsity = block_sparsity;
  return out;
}

double BlockMatrixSignal::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& b : blocks) {
    sum += b.squaredNorm();
  }
  return std::sqrt(sum);
}

std::vector<Index> BlockMatrixSignal::nonzero_blocks() const {
  std::vector<Index> out;
  for (Index i = 0; i < block_count(); ++i) {
    if (!blocks[static_cast<std::size_t>(i)].isZero(0.0)) {
      out.push_back(i);
    }
  }
  return out;
}

bool BlockMatrixSignal::same_shape(const BlockMatrixSignal& other) const {
  if (blocks.size() != other.blocks.size()) {
    return false;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].rows() != other.blocks[i].rows() || blocks[i].cols() != other.blocks[i].cols()) {
      return false;
    }
  }
  return true;
}

namespace {

void require_same_shape(const BlockMatrixSignal& a, const BlockMatrixSignal& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": block shapes differ");
  }
}

using Svd = Eigen::JacobiSVD<Eigen::MatrixXcd>;

}  // namespace

BlockMatrixSignal operator-(const BlockMatrixSignal& a, const BlockMatrixSignal& b) {
  require_same_shape(a, b, "BlockMatrixSignal subtraction");
  BlockMatrixSignal out = a;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    out.blocks[i] -= b.blocks[i];
  }
  return out;
}

BlockMatrixSignal operator+(const BlockMatrixSignal& a, const BlockMatrixSignal& b) {
  require_same_shape(a, b, "BlockMatrixSignal addition");
  BlockMatrixSignal out = a;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    out.blocks[i] += b.blocks[i];
  }
  return out;
}

BlockMatrixSignal operator*(cplx alpha, const BlockMatrixSignal& a) {
  BlockMatrixSignal out = a;
  for (auto& b : out.blocks) {
    b *= alpha;
  }
  return out;
}

Index numerical_rank(const Eigen::MatrixXcd& m, double rel_tol) {
  if (m.size() == 0) {
    return 0;
  }
  const Eigen::VectorXd sv = Svd(m).singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) {
    return 0;
  }
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) {
      ++rank;
    }
  }
  return rank;
}

Eigen::MatrixXcd rank_project(const Eigen::MatrixXcd& rho, Index r) {
  if (r < 0) {
    throw ParameterError("rank_project: negative rank " + std::to_string(r));
  }
  const Index k = std::min<Index>(r, std::min(rho.rows(), rho.cols()));
  if (k == 0) {
    return Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  }
  if (k == std::min(rho.rows(), rho.cols())) {
    return rho;
  }
  const Svd svd(rho, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // Singular values come out in descending order; keep the leading k.
  return svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal() * svd.matrixV().leftCols(k).adjoint();
}

BlockMatrixSignal rank_project_blocks(const BlockMatrixSignal& x, Index r) {
  BlockMatrixSignal out = x;
  for (auto& b : out.blocks) {
    b = rank_project(b, r);
  }
  out.rank_bound = r;
  out.block_sparsity = x.block_count();
  return out;
}

BlockMatrixSignal rank_project_on_blocks(const BlockMatrixSignal& x, Index r, std::span<const Index> blocks) {
  BlockMatrixSignal out = BlockMatrixSignal::zeros(x.block_count(), x.rows(), x.cols(), r,
                                                   static_cast<Index>(blocks.size()));
  for (Index i : blocks) {
    if (i < 0 || i >= x.block_count()) {
      throw ParameterError("rank_project_on_blocks: block index " + std::to_string(i) + " out of range");
    }
    out.blocks[static_cast<std::size_t>(i)] = rank_project(x.blocks[static_cast<std::size_t>(i)], r);
  }
  return out;
}

BlockMatrixSignal demix_threshold(const BlockMatrixSignal& x, Index s, Index r) {
  if (s < 0 || s > x.block_count()) {
    throw ParameterError("demix_threshold: s=" + std::to_string(s) + " outside [0, N=" +
                         std::to_string(x.block_count()) + "]");
  }
  BlockMatrixSignal projected = rank_project_blocks(x, r);
  std::vector<double> energy;
  energy.reserve(projected.blocks.size());
  for (const auto& b : projected.blocks) {
    energy.push_back(b.squaredNorm());
  }
  const auto keep = largest_indices(energy, s);
  BlockMatrixSignal out = BlockMatrixSignal::zeros(x.block_count(), x.rows(), x.cols(), r, s);
  for (Index i : keep) {
    out.blocks[static_cast<std::size_t>(i)] = std::move(projected.blocks[static_cast<std::size_t>(i)]);
  }
  return out;
}

BlockMatrixSignal tangent_project(const BlockMatrixSignal& x, const BlockMatrixSignal& g) {
  require_same_shape(x, g, "tangent_project");
  BlockMatrixSignal out = g;
  for (std::size_t i = 0; i < x.blocks.size(); ++i) {
    const auto& xi = x.blocks[i];
    if (xi.isZero(0.0)) {
      continue;
    }
    const Svd svd(xi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-10 * sv[0]) {
      ++rank;
    }
    const Eigen::MatrixXcd u = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXcd v = svd.matrixV().leftCols(rank);
    const auto& gi = g.blocks[i];
    // g - (I - UU*) g (I - VV*) = UU* g + g VV* - UU* g VV*
    const Eigen::MatrixXcd ug = u.adjoint() * gi;
    const Eigen::MatrixXcd gv = gi * v;
    out.blocks[i] = u * ug + gv * v.adjoint() - u * (ug * v) * v.adjoint();
  }
  return out;
}

}  // namespace hics
