#include <sstream>

#include "hics/hisignal.hpp"

namespace hics {

namespace {

Index validate(const TreeSparsityProfile::Node& node) {
  if (node.block_size <= 0) {
    throw ParameterError("TreeSparsityProfile: block size must be positive");
  }
  if (node.sparsity < 0 || node.sparsity > node.block_size) {
    throw ParameterError("TreeSparsityProfile: sparsity " + std::to_string(node.sparsity) + " exceeds block size " +
                         std::to_string(node.block_size));
  }
  if (node.children.empty()) {
    return node.block_size;
  }
  if (static_cast<Index>(node.children.size()) != node.block_size) {
    throw ParameterError("TreeSparsityProfile: inner node has " + std::to_string(node.children.size()) +
                         " children but block size " + std::to_string(node.block_size));
  }
  Index leaves = 0;
  for (const auto& child : node.children) {
    leaves += validate(child);
  }
  return leaves;
}

TreeSparsityProfile::Node make_uniform(const std::vector<Index>& fanouts, const std::vector<Index>& sparsities,
                                       std::size_t level) {
  TreeSparsityProfile::Node node{fanouts[level], sparsities[level], {}};
  if (level + 1 < fanouts.size()) {
    node.children.assign(static_cast<std::size_t>(std::max<Index>(fanouts[level], 0)),
                         make_uniform(fanouts, sparsities, level + 1));
  }
  return node;
}

Index node_depth(const TreeSparsityProfile::Node& node) {
  Index d = 0;
  for (const auto& c : node.children) {
    d = std::max(d, node_depth(c));
  }
  return d + 1;
}

struct Selection {
  std::vector<Index> indices;
  double energy = 0.0;
};

// Project the subtree rooted at `node`, whose leaves start at `offset`.
Selection select_node(const TreeSparsityProfile::Node& node, const Eigen::VectorXd& abs2, Index offset) {
  Selection out;
  if (node.children.empty()) {
    std::span<const double> keys(abs2.data() + offset, static_cast<std::size_t>(node.block_size));
    for (Index i : largest_indices(keys, node.sparsity)) {
      out.indices.push_back(offset + i);
      out.energy += keys[static_cast<std::size_t>(i)];
    }
    return out;
  }
  std::vector<Selection> children;
  std::vector<double> energy;
  children.reserve(node.children.size());
  Index child_offset = offset;
  for (const auto& child : node.children) {
    children.push_back(select_node(child, abs2, child_offset));
    energy.push_back(children.back().energy);
    Index leaves = 0;
    // Leaf count of the child subtree.
    std::vector<const TreeSparsityProfile::Node*> stack{&child};
    while (!stack.empty()) {
      const auto* n = stack.back();
      stack.pop_back();
      if (n->children.empty()) {
        leaves += n->block_size;
      } else {
        for (const auto& c : n->children) {
          stack.push_back(&c);
        }
      }
    }
    child_offset += leaves;
  }
  for (Index c : largest_indices(energy, node.sparsity)) {
    auto& sel = children[static_cast<std::size_t>(c)];
    out.indices.insert(out.indices.end(), sel.indices.begin(), sel.indices.end());
    out.energy += sel.energy;
  }
  return out;
}

void describe_node(std::ostream& os, const TreeSparsityProfile::Node& node) {
  os << "(" << node.block_size << "," << node.sparsity;
  if (!node.children.empty()) {
    os << ":";
    describe_node(os, node.children.front());
  }
  os << ")";
}

}  // namespace

TreeSparsityProfile::TreeSparsityProfile(Node root) : root_(std::move(root)), leaf_count_(validate(root_)) {}

TreeSparsityProfile TreeSparsityProfile::uniform(const std::vector<Index>& fanouts,
                                                 const std::vector<Index>& sparsities) {
  if (fanouts.empty() || fanouts.size() != sparsities.size()) {
    throw ParameterError("TreeSparsityProfile::uniform: need matching non-empty fan-out and sparsity lists");
  }
  return TreeSparsityProfile(make_uniform(fanouts, sparsities, 0));
}

TreeSparsityProfile TreeSparsityProfile::two_level(Index N, Index n, Index s, Index sigma) {
  return uniform({N, n}, {s, sigma});
}

Index TreeSparsityProfile::depth() const { return node_depth(root_); }

TreeSparsity::TreeSparsity(TreeSparsityProfile profile) : profile_(std::move(profile)) {}

std::vector<Index> TreeSparsity::select(const Eigen::VectorXd& abs2) const {
  if (abs2.size() != profile_.leaf_count()) {
    throw DimensionError("TreeSparsity::select: vector length " + std::to_string(abs2.size()) +
                         " != profile leaf count " + std::to_string(profile_.leaf_count()));
  }
  auto sel = select_node(profile_.root(), abs2, 0);
  std::sort(sel.indices.begin(), sel.indices.end());
  return sel.indices;
}

Index TreeSparsity::block_len() const {
  const auto& root = profile_.root();
  if (root.children.empty()) {
    return root.block_size;
  }
  return profile_.leaf_count() / root.block_size;
}

std::string TreeSparsity::describe() const {
  std::ostringstream os;
  os << "tree";
  describe_node(os, profile_.root());
  return os.str();
}

template <typename Scalar>
Vec<Scalar> tree_threshold(const Vec<Scalar>& z, const TreeSparsityProfile& profile) {
  if (z.size() != profile.leaf_count()) {
    throw ParameterError("tree_threshold: vector length " + std::to_string(z.size()) + " != profile leaf count " +
                         std::to_string(profile.leaf_count()));
  }
  const TreeSparsity model(profile);
  return model_project(model, z);
}

template Vec<double> tree_threshold<double>(const Vec<double>&, const TreeSparsityProfile&);
template Vec<cplx> tree_threshold<cplx>(const Vec<cplx>&, const TreeSparsityProfile&);

}  // namespace hics
