#include <algorithm>

#include "hics/hisignal.hpp"

namespace hics {

template <typename Scalar>
BlockedVector<Scalar>::BlockedVector(Index block_count, Index block_len)
    : BlockedVector(Vec<Scalar>::Zero(std::max<Index>(block_count, 0) * std::max<Index>(block_len, 0)), block_count,
                    block_len) {}

template <typename Scalar>
BlockedVector<Scalar>::BlockedVector(Vec<Scalar> data, Index block_count, Index block_len)
    : data_(std::move(data)), block_count_(block_count), block_len_(block_len) {
  if (block_count <= 0 || block_len <= 0) {
    throw DimensionError("BlockedVector: block count and block length must be positive");
  }
  if (data_.size() != block_count * block_len) {
    throw DimensionError("BlockedVector: data length " + std::to_string(data_.size()) + " != " +
                         std::to_string(block_count) + " * " + std::to_string(block_len));
  }
}

template class BlockedVector<double>;
template class BlockedVector<cplx>;

Index HiSupport::size() const {
  Index total = 0;
  for (const auto& [block, idx] : entries) {
    total += static_cast<Index>(idx.size());
  }
  return total;
}

bool HiSupport::contains(Index block, Index entry) const {
  const auto it = entries.find(block);
  return it != entries.end() && std::binary_search(it->second.begin(), it->second.end(), entry);
}

std::vector<Index> HiSupport::flat(Index block_len) const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (const auto& [block, idx] : entries) {
    for (Index e : idx) {
      out.push_back(block * block_len + e);
    }
  }
  return out;
}

HiSupport HiSupport::from_flat(std::span<const Index> flat, Index block_len) {
  if (block_len <= 0) {
    throw DimensionError("HiSupport::from_flat: block length must be positive");
  }
  HiSupport out;
  for (Index f : flat) {
    out.entries[f / block_len].push_back(f % block_len);
  }
  for (auto& [block, idx] : out.entries) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  }
  return out;
}

bool HiSupport::is_hierarchical(Index s, Index sigma) const {
  if (block_count() > s) {
    return false;
  }
  return std::all_of(entries.begin(), entries.end(), [sigma](const auto& kv) {
    return !kv.second.empty() && static_cast<Index>(kv.second.size()) <= sigma;
  });
}

}  // namespace hics
