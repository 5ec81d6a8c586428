#pragma once

// Signal types of the hierarchical model and the projections onto the
// structured sets: plain top-k, two-level (s, sigma) hierarchical
// thresholding, its recursive tree generalization, and the block-sparse /
// low-rank projector used for de-mixing.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hics/types.hpp"

namespace hics {

/// A length N*n vector split into N contiguous blocks of length n.
template <typename Scalar>
class BlockedVector {
 public:
  BlockedVector(Index block_count, Index block_len);
  BlockedVector(Vec<Scalar> data, Index block_count, Index block_len);

  Index block_count() const { return block_count_; }
  Index block_len() const { return block_len_; }
  Index size() const { return data_.size(); }

  const Vec<Scalar>& data() const { return data_; }
  Vec<Scalar>& data() { return data_; }

  auto block(Index i) { return data_.segment(i * block_len_, block_len_); }
  auto block(Index i) const { return data_.segment(i * block_len_, block_len_); }

  double norm() const { return data_.norm(); }

 private:
  Vec<Scalar> data_;
  Index block_count_;
  Index block_len_;
};

/// Two-level support: active block index -> sorted active in-block indices.
/// Ordering is deterministic (std::map plus sorted vectors).
struct HiSupport {
  std::map<Index, std::vector<Index>> entries;

  bool empty() const { return entries.empty(); }
  Index block_count() const { return static_cast<Index>(entries.size()); }
  Index size() const;
  bool contains(Index block, Index entry) const;

  /// Flat indices block*block_len + entry, ascending.
  std::vector<Index> flat(Index block_len) const;
  static HiSupport from_flat(std::span<const Index> flat, Index block_len);

  /// True if at most s blocks, each non-empty with at most sigma entries.
  bool is_hierarchical(Index s, Index sigma) const;

  bool operator==(const HiSupport&) const = default;
};

/// Rooted tree describing a multi-level sparsity pattern. A node with no
/// children is a bottom block of `block_size` leaves; an inner node has
/// exactly `block_size` children. `sparsity` bounds the number of active
/// children (or leaves) of the node.
class TreeSparsityProfile {
 public:
  struct Node {
    Index block_size = 0;
    Index sparsity = 0;
    std::vector<Node> children;
  };

  explicit TreeSparsityProfile(Node root);

  /// Uniform tree: level l has fan-out fanouts[l] and sparsity sparsities[l],
  /// from the root downwards. The last level fans out to leaves.
  static TreeSparsityProfile uniform(const std::vector<Index>& fanouts, const std::vector<Index>& sparsities);

  /// Root with N children of n leaves each: the (s, sigma) model.
  static TreeSparsityProfile two_level(Index N, Index n, Index s, Index sigma);

  const Node& root() const { return root_; }
  Index leaf_count() const { return leaf_count_; }
  Index depth() const;

 private:
  Node root_;
  Index leaf_count_;
};

/// A structured sparsity set with an exact projection, expressed through
/// the index set it selects. Selection only depends on squared moduli, so
/// one model serves real and complex signals.
class SparsityModel {
 public:
  virtual ~SparsityModel() = default;

  virtual Index dim() const = 0;

  /// Indices (ascending) kept by the projection of a vector with the
  /// given squared moduli. May include entries whose modulus is zero.
  virtual std::vector<Index> select(const Eigen::VectorXd& abs2) const = 0;

  /// Block length used when reporting supports as HiSupport.
  virtual Index block_len() const = 0;

  virtual std::string describe() const = 0;
};

/// (s, sigma)-sparse vectors with N blocks of length n.
class HiSparsity final : public SparsityModel {
 public:
  HiSparsity(Index block_count, Index block_len, Index s, Index sigma);

  Index dim() const override { return block_count_ * block_len_; }
  std::vector<Index> select(const Eigen::VectorXd& abs2) const override;
  Index block_len() const override { return block_len_; }
  std::string describe() const override;

  Index block_count() const { return block_count_; }
  Index s() const { return s_; }
  Index sigma() const { return sigma_; }

 private:
  Index block_count_;
  Index block_len_;
  Index s_;
  Index sigma_;
};

/// Multi-level model given by a TreeSparsityProfile.
class TreeSparsity final : public SparsityModel {
 public:
  explicit TreeSparsity(TreeSparsityProfile profile);

  Index dim() const override { return profile_.leaf_count(); }
  std::vector<Index> select(const Eigen::VectorXd& abs2) const override;
  Index block_len() const override;
  std::string describe() const override;

  const TreeSparsityProfile& profile() const { return profile_; }

 private:
  TreeSparsityProfile profile_;
};

/// Applies `inner` to the transpose of a row-major rows x cols matrix, so
/// that its blocks run down the columns. Supports are reported in the
/// original layout (blocks of length cols).
class TransposedSparsity final : public SparsityModel {
 public:
  TransposedSparsity(std::unique_ptr<SparsityModel> inner, Index rows, Index cols);

  Index dim() const override { return rows_ * cols_; }
  std::vector<Index> select(const Eigen::VectorXd& abs2) const override;
  Index block_len() const override { return cols_; }
  std::string describe() const override;

  const SparsityModel& inner() const { return *inner_; }

 private:
  std::unique_ptr<SparsityModel> inner_;
  Index rows_;
  Index cols_;
};

/// Indices of the k largest keys, ascending. Ties go to the lower index.
std::vector<Index> largest_indices(std::span<const double> keys, Index k);

template <typename Scalar>
Eigen::VectorXd squared_moduli(const Vec<Scalar>& z);

/// Selected indices of `model` on z that carry a nonzero value.
template <typename Scalar>
std::vector<Index> model_support(const SparsityModel& model, const Vec<Scalar>& z);

/// Projection of z onto the model set.
template <typename Scalar>
Vec<Scalar> model_project(const SparsityModel& model, const Vec<Scalar>& z);

/// z restricted to the given flat indices, zero elsewhere.
template <typename Scalar>
Vec<Scalar> restrict_to_indices(const Vec<Scalar>& z, std::span<const Index> indices);

/// Keep the k entries of largest modulus.
template <typename Scalar>
Vec<Scalar> top_k_threshold(const Vec<Scalar>& z, Index k);

/// Hierarchical hard thresholding: per-block top-sigma, then the s blocks
/// of largest l2 norm. Exact projection onto the (s, sigma)-sparse set.
template <typename Scalar>
BlockedVector<Scalar> hi_threshold(const BlockedVector<Scalar>& z, Index s, Index sigma);

/// Support (nonzero entries) of hi_threshold(z, s, sigma).
template <typename Scalar>
HiSupport hi_support(const BlockedVector<Scalar>& z, Index s, Index sigma);

/// Recursive thresholding along a TreeSparsityProfile.
template <typename Scalar>
Vec<Scalar> tree_threshold(const Vec<Scalar>& z, const TreeSparsityProfile& profile);

template <typename Scalar>
BlockedVector<Scalar> restrict_to_support(const BlockedVector<Scalar>& x, const HiSupport& support);

// --- block-sparse, low-rank signals ---------------------------------------

/// N complex matrix blocks of a common shape. rank_bound and block_sparsity
/// record the structure the signal is meant to satisfy.
struct BlockMatrixSignal {
  std::vector<Eigen::MatrixXcd> blocks;
  Index rank_bound = 0;
  Index block_sparsity = 0;

  static BlockMatrixSignal zeros(Index block_count, Index rows, Index cols, Index rank_bound, Index block_sparsity);

  Index block_count() const { return static_cast<Index>(blocks.size()); }
  Index rows() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  Index cols() const { return blocks.empty() ? 0 : blocks.front().cols(); }

  double frobenius_norm() const;
  /// Blocks with at least one nonzero entry, ascending.
  std::vector<Index> nonzero_blocks() const;
  bool same_shape(const BlockMatrixSignal& other) const;
};

BlockMatrixSignal operator-(const BlockMatrixSignal& a, const BlockMatrixSignal& b);
BlockMatrixSignal operator+(const BlockMatrixSignal& a, const BlockMatrixSignal& b);
BlockMatrixSignal operator*(cplx alpha, const BlockMatrixSignal& a);

/// Count of singular values above rel_tol * sigma_max.
Index numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-10);

/// Best rank <= r approximation (truncated SVD).
Eigen::MatrixXcd rank_project(const Eigen::MatrixXcd& rho, Index r);

/// Rank projection of every block, then the s blocks of largest Frobenius
/// norm are kept.
BlockMatrixSignal demix_threshold(const BlockMatrixSignal& x, Index s, Index r);

/// Rank projection of every block only (no block selection).
BlockMatrixSignal rank_project_blocks(const BlockMatrixSignal& x, Index r);

/// Rank projection on a fixed set of blocks; all others are zeroed.
BlockMatrixSignal rank_project_on_blocks(const BlockMatrixSignal& x, Index r, std::span<const Index> blocks);

/// Blockwise projection onto the tangent space of the fixed-rank manifold
/// at X: g - (I - P_U) g (I - P_V). Zero blocks of X use identity projectors.
BlockMatrixSignal tangent_project(const BlockMatrixSignal& x, const BlockMatrixSignal& g);

}  // namespace hics
