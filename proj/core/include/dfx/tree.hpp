#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfx/lattice.hpp"

namespace dfx {

/// One entry of a tree stored in preorder. A node with left < 0 is a leaf.
struct TreeNode {
  int feature = 0;  // 1-based
  double threshold = 0.0;
  int label = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;

  bool is_leaf() const noexcept { return left < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary axis-aligned decision tree: x goes left when x[feature] <= threshold.
/// Labels are +1/-1 in the theory code and class ids for multiclass learning.
class Tree {
 public:
  static Tree leaf(int label);
  static Tree node(int feature, double threshold, const Tree& left, const Tree& right);
  /// Nodes must be in preorder with valid child links; validated.
  static Tree from_nodes(std::vector<TreeNode> nodes);

  int eval(std::span<const double> x) const;
  int eval(std::span<const Coord> x) const;

  std::size_t leaf_count() const noexcept { return leaves_; }
  /// Parameter count: 3m + 1 for m internal nodes.
  int dim() const noexcept { return 3 * static_cast<int>(leaves_ - 1) + 1; }
  int depth() const;
  /// Largest feature index referenced; 0 for a single leaf.
  int max_feature() const noexcept;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& root() const noexcept { return nodes_.front(); }
  /// Subtree rooted at node i, re-indexed.
  Tree subtree(std::size_t i) const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  Tree() = default;
  void copy_subtree(const Tree& from, std::size_t at);

  std::vector<TreeNode> nodes_;
  std::size_t leaves_ = 0;
};

inline int dim_of(const Tree& tree) noexcept { return tree.dim(); }
inline std::size_t leaf_count(const Tree& tree) noexcept { return tree.leaf_count(); }

/// Restricted-size trees over an ambient space of dimension d: dim <= 6d + 1.
struct SizeBudget {
  int ambient_dim = 1;

  int max_dim() const noexcept { return 6 * ambient_dim + 1; }
  bool admits(const Tree& tree) const noexcept { return tree.dim() <= max_dim(); }
};

struct Interval {
  int lo = 1;
  int hi = 0;

  bool empty() const noexcept { return lo > hi; }
  std::uint64_t length() const noexcept { return empty() ? 0 : static_cast<std::uint64_t>(hi - lo + 1); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Integer box prod_i [lo_i, hi_i] inside a lattice; may be empty.
struct Hyperrectangle {
  std::vector<Interval> bounds;

  static Hyperrectangle whole(const LatticeSpace& space);
  std::uint64_t volume() const noexcept;
  bool contains(std::span<const Coord> x) const noexcept;
  friend bool operator==(const Hyperrectangle&, const Hyperrectangle&) = default;
};

struct LeafRegion {
  Hyperrectangle box;
  int label = 0;
};

/// One region per leaf, in preorder. Regions are disjoint and cover the
/// lattice; leaves unreachable from any lattice point get an empty box.
std::vector<LeafRegion> leaf_regions(const Tree& tree, const LatticeSpace& space);

}  // namespace dfx
