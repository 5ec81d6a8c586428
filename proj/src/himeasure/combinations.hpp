#pragma once

#include <vector>

#include "hics/types.hpp"

namespace hics::detail {

/// All k-subsets of [0, n) in lexicographic order.
inline std::vector<std::vector<Index>> combinations(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  if (k < 0 || k > n) {
    return out;
  }
  std::vector<Index> c(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    c[static_cast<std::size_t>(i)] = i;
  }
  while (true) {
    out.push_back(c);
    Index i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) {
      --i;
    }
    if (i < 0) {
      break;
    }
    ++c[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

}  // namespace hics::detail
