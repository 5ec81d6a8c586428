#include <algorithm>
#include <numeric>
#include <sstream>

#include "hics/hisignal.hpp"

namespace hics {

std::vector<Index> largest_indices(std::span<const double> keys, Index k) {
  const auto n = static_cast<Index>(keys.size());
  if (k < 0 || k > n) {
    throw ParameterError("largest_indices: k=" + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  }
  std::vector<Index> order(keys.size());
  std::iota(order.begin(), order.end(), Index{0});
  if (k < n) {
    // Strict total order: larger key first, lower index on ties.
    auto before = [&keys](Index a, Index b) {
      const double ka = keys[static_cast<std::size_t>(a)];
      const double kb = keys[static_cast<std::size_t>(b)];
      return ka > kb || (ka == kb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + k, order.end(), before);
    order.resize(static_cast<std::size_t>(k));
  }
  std::sort(order.begin(), order.end());
  return order;
}

template <typename Scalar>
Eigen::VectorXd squared_moduli(const Vec<Scalar>& z) {
  Eigen::VectorXd out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    out[i] = abs2(z[i]);
  }
  return out;
}

template <typename Scalar>
Vec<Scalar> restrict_to_indices(const Vec<Scalar>& z, std::span<const Index> indices) {
  Vec<Scalar> out = Vec<Scalar>::Zero(z.size());
  for (Index i : indices) {
    if (i < 0 || i >= z.size()) {
      throw ParameterError("restrict_to_indices: index " + std::to_string(i) + " out of range");
    }
    out[i] = z[i];
  }
  return out;
}

template <typename Scalar>
std::vector<Index> model_support(const SparsityModel& model, const Vec<Scalar>& z) {
  if (z.size() != model.dim()) {
    throw DimensionError("model_support: vector length " + std::to_string(z.size()) + " != model dimension " +
                         std::to_string(model.dim()));
  }
  std::vector<Index> selected = model.select(squared_moduli(z));
  std::erase_if(selected, [&z](Index i) { return z[i] == Scalar(0); });
  return selected;
}

template <typename Scalar>
Vec<Scalar> model_project(const SparsityModel& model, const Vec<Scalar>& z) {
  if (z.size() != model.dim()) {
    throw DimensionError("model_project: vector length " + std::to_string(z.size()) + " != model dimension " +
                         std::to_string(model.dim()));
  }
  const std::vector<Index> selected = model.select(squared_moduli(z));
  return restrict_to_indices<Scalar>(z, selected);
}

template <typename Scalar>
Vec<Scalar> top_k_threshold(const Vec<Scalar>& z, Index k) {
  if (k < 0 || k > z.size()) {
    throw ParameterError("top_k_threshold: k=" + std::to_string(k) + " exceeds length " + std::to_string(z.size()));
  }
  const Eigen::VectorXd a2 = squared_moduli(z);
  const auto keep = largest_indices({a2.data(), static_cast<std::size_t>(a2.size())}, k);
  return restrict_to_indices<Scalar>(z, keep);
}

HiSparsity::HiSparsity(Index block_count, Index block_len, Index s, Index sigma)
    : block_count_(block_count), block_len_(block_len), s_(s), sigma_(sigma) {
  if (block_count <= 0 || block_len <= 0) {
    throw DimensionError("HiSparsity: block count and block length must be positive");
  }
  if (s < 0 || s > block_count) {
    throw ParameterError("HiSparsity: s=" + std::to_string(s) + " outside [0, N=" + std::to_string(block_count) + "]");
  }
  if (sigma < 0 || sigma > block_len) {
    throw ParameterError("HiSparsity: sigma=" + std::to_string(sigma) + " outside [0, n=" + std::to_string(block_len) +
                         "]");
  }
}

std::vector<Index> HiSparsity::select(const Eigen::VectorXd& abs2) const {
  if (abs2.size() != dim()) {
    throw DimensionError("HiSparsity::select: length mismatch");
  }
  std::vector<std::vector<Index>> per_block(static_cast<std::size_t>(block_count_));
  std::vector<double> energy(static_cast<std::size_t>(block_count_), 0.0);
  for (Index b = 0; b < block_count_; ++b) {
    std::span<const double> keys(abs2.data() + b * block_len_, static_cast<std::size_t>(block_len_));
    auto& idx = per_block[static_cast<std::size_t>(b)];
    idx = largest_indices(keys, sigma_);
    double e = 0.0;
    for (Index i : idx) {
      e += keys[static_cast<std::size_t>(i)];
    }
    energy[static_cast<std::size_t>(b)] = e;
  }
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(s_ * sigma_));
  for (Index b : largest_indices(energy, s_)) {
    for (Index i : per_block[static_cast<std::size_t>(b)]) {
      out.push_back(b * block_len_ + i);
    }
  }
  return out;
}

std::string HiSparsity::describe() const {
  std::ostringstream os;
  os << "hierarchical(N=" << block_count_ << ", n=" << block_len_ << ", s=" << s_ << ", sigma=" << sigma_ << ")";
  return os.str();
}

TransposedSparsity::TransposedSparsity(std::unique_ptr<SparsityModel> inner, Index rows, Index cols)
    : inner_(std::move(inner)), rows_(rows), cols_(cols) {
  if (!inner_) {
    throw ParameterError("TransposedSparsity: missing inner model");
  }
  if (rows <= 0 || cols <= 0 || inner_->dim() != rows * cols) {
    throw DimensionError("TransposedSparsity: inner model dimension " + std::to_string(inner_->dim()) +
                         " != " + std::to_string(rows) + " x " + std::to_string(cols));
  }
}

std::vector<Index> TransposedSparsity::select(const Eigen::VectorXd& abs2) const {
  if (abs2.size() != dim()) {
    throw DimensionError("TransposedSparsity::select: length mismatch");
  }
  Eigen::VectorXd t(dim());
  for (Index i = 0; i < rows_; ++i) {
    for (Index j = 0; j < cols_; ++j) {
      t[j * rows_ + i] = abs2[i * cols_ + j];
    }
  }
  std::vector<Index> out;
  for (Index k : inner_->select(t)) {
    out.push_back((k % rows_) * cols_ + k / rows_);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string TransposedSparsity::describe() const { return "transposed(" + inner_->describe() + ")"; }

template <typename Scalar>
BlockedVector<Scalar> hi_threshold(const BlockedVector<Scalar>& z, Index s, Index sigma) {
  const HiSparsity model(z.block_count(), z.block_len(), s, sigma);
  return BlockedVector<Scalar>(model_project(model, z.data()), z.block_count(), z.block_len());
}

template <typename Scalar>
HiSupport hi_support(const BlockedVector<Scalar>& z, Index s, Index sigma) {
  const HiSparsity model(z.block_count(), z.block_len(), s, sigma);
  const auto flat = model_support(model, z.data());
  return HiSupport::from_flat(flat, z.block_len());
}

template <typename Scalar>
BlockedVector<Scalar> restrict_to_support(const BlockedVector<Scalar>& x, const HiSupport& support) {
  for (const auto& [block, idx] : support.entries) {
    if (block < 0 || block >= x.block_count()) {
      throw ParameterError("restrict_to_support: block index " + std::to_string(block) + " out of range");
    }
    for (Index e : idx) {
      if (e < 0 || e >= x.block_len()) {
        throw ParameterError("restrict_to_support: entry index " + std::to_string(e) + " out of range in block " +
                             std::to_string(block));
      }
    }
  }
  const auto flat = support.flat(x.block_len());
  return BlockedVector<Scalar>(restrict_to_indices<Scalar>(x.data(), flat), x.block_count(), x.block_len());
}

#define HICS_INSTANTIATE(S)                                                                           \
  template Eigen::VectorXd squared_moduli<S>(const Vec<S>&);                                          \
  template Vec<S> restrict_to_indices<S>(const Vec<S>&, std::span<const Index>);                       \
  template std::vector<Index> model_support<S>(const SparsityModel&, const Vec<S>&);                  \
  template Vec<S> model_project<S>(const SparsityModel&, const Vec<S>&);                              \
  template Vec<S> top_k_threshold<S>(const Vec<S>&, Index);                                           \
  template BlockedVector<S> hi_threshold<S>(const BlockedVector<S>&, Index, Index);                   \
  template HiSupport hi_support<S>(const BlockedVector<S>&, Index, Index);                            \
  template BlockedVector<S> restrict_to_support<S>(const BlockedVector<S>&, const HiSupport&);

HICS_INSTANTIATE(double)
HICS_INSTANTIATE(cplx)
#undef HICS_INSTANTIATE

}  // namespace hics
