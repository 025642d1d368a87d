#include "dfx/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dfx/error.hpp"

namespace dfx {

namespace {

[[noreturn]] void feature_out_of_range(int feature, std::size_t width) {
  throw Error(Errc::FeatureOutOfRange,
              "tree reads feature " + std::to_string(feature) + " but input has " + std::to_string(width));
}

// Integer cut equivalent to "x <= threshold" on integer x, clamped to int.
int integer_cut(double threshold) {
  const double f = std::floor(threshold);
  if (f > static_cast<double>(std::numeric_limits<int>::max() / 2)) return std::numeric_limits<int>::max() / 2;
  if (f < static_cast<double>(std::numeric_limits<int>::min() / 2)) return std::numeric_limits<int>::min() / 2;
  return static_cast<int>(f);
}

}  // namespace

Tree Tree::leaf(int label) {
  Tree t;
  t.nodes_.push_back(TreeNode{0, 0.0, label, -1, -1});
  t.leaves_ = 1;
  return t;
}

Tree Tree::node(int feature, double threshold, const Tree& left, const Tree& right) {
  if (feature < 1) throw Error(Errc::InvalidArgument, "feature index must be >= 1");
  if (!std::isfinite(threshold)) throw Error(Errc::InvalidArgument, "threshold must be finite");
  Tree t;
  t.nodes_.reserve(1 + left.nodes_.size() + right.nodes_.size());
  t.nodes_.push_back(TreeNode{feature, threshold, 0, 1, static_cast<std::int32_t>(1 + left.nodes_.size())});
  t.copy_subtree(left, 1);
  t.copy_subtree(right, 1 + left.nodes_.size());
  t.leaves_ = left.leaves_ + right.leaves_;
  return t;
}

void Tree::copy_subtree(const Tree& from, std::size_t at) {
  const auto offset = static_cast<std::int32_t>(at);
  for (TreeNode n : from.nodes_) {
    if (!n.is_leaf()) {
      n.left += offset;
      n.right += offset;
    }
    nodes_.push_back(n);
  }
}

Tree Tree::from_nodes(std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw Error(Errc::InvalidArgument, "tree needs at least one node");
  // Preorder check: the subtree at i occupies [i, end(i)); left child is i+1.
  std::size_t leaves = 0;
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t i) -> std::size_t {
    if (i >= nodes.size()) throw Error(Errc::InvalidArgument, "tree node link out of range");
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) {
      ++leaves;
      return i + 1;
    }
    if (n.feature < 1 || !std::isfinite(n.threshold)) throw Error(Errc::InvalidArgument, "bad split node");
    if (static_cast<std::size_t>(n.left) != i + 1) throw Error(Errc::InvalidArgument, "nodes not in preorder");
    const std::size_t after_left = walk(i + 1);
    if (static_cast<std::size_t>(n.right) != after_left) throw Error(Errc::InvalidArgument, "nodes not in preorder");
    return walk(after_left);
  };
  if (walk(0) != nodes.size()) throw Error(Errc::InvalidArgument, "unreachable tree nodes");
  Tree t;
  t.nodes_ = std::move(nodes);
  t.leaves_ = leaves;
  return t;
}

int Tree::eval(std::span<const double> x) const {
  std::size_t i = 0;
  for (;;) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) return n.label;
    if (static_cast<std::size_t>(n.feature) > x.size()) feature_out_of_range(n.feature, x.size());
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature - 1)] <= n.threshold ? n.left : n.right);
  }
}

int Tree::eval(std::span<const Coord> x) const {
  std::size_t i = 0;
  for (;;) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) return n.label;
    if (static_cast<std::size_t>(n.feature) > x.size()) feature_out_of_range(n.feature, x.size());
    const double v = x[static_cast<std::size_t>(n.feature - 1)];
    i = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
  }
}

int Tree::depth() const {
  std::function<int(std::size_t)> rec = [&](std::size_t i) -> int {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(rec(static_cast<std::size_t>(n.left)), rec(static_cast<std::size_t>(n.right)));
  };
  return rec(0);
}

int Tree::max_feature() const noexcept {
  int m = 0;
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) m = std::max(m, n.feature);
  }
  return m;
}

Tree Tree::subtree(std::size_t i) const {
  std::function<Tree(std::size_t)> rec = [&](std::size_t k) -> Tree {
    const TreeNode& n = nodes_.at(k);
    if (n.is_leaf()) return Tree::leaf(n.label);
    return Tree::node(n.feature, n.threshold, rec(static_cast<std::size_t>(n.left)),
                      rec(static_cast<std::size_t>(n.right)));
  };
  return rec(i);
}

Hyperrectangle Hyperrectangle::whole(const LatticeSpace& space) {
  return {std::vector<Interval>(static_cast<std::size_t>(space.dim()), Interval{1, space.cardinality()})};
}

std::uint64_t Hyperrectangle::volume() const noexcept {
  std::uint64_t v = 1;
  for (const auto& b : bounds) v *= b.length();
  return v;
}

bool Hyperrectangle::contains(std::span<const Coord> x) const noexcept {
  if (x.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bounds[i].lo || x[i] > bounds[i].hi) return false;
  }
  return true;
}

std::vector<LeafRegion> leaf_regions(const Tree& tree, const LatticeSpace& space) {
  if (tree.max_feature() > space.dim()) feature_out_of_range(tree.max_feature(), static_cast<std::size_t>(space.dim()));
  std::vector<LeafRegion> out;
  out.reserve(tree.leaf_count());
  const auto& nodes = tree.nodes();
  std::function<void(std::size_t, Hyperrectangle&)> rec = [&](std::size_t i, Hyperrectangle& box) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) {
      out.push_back({box, n.label});
      return;
    }
    auto& iv = box.bounds[static_cast<std::size_t>(n.feature - 1)];
    const Interval saved = iv;
    const int cut = integer_cut(n.threshold);
    iv.hi = std::min(saved.hi, cut);
    rec(static_cast<std::size_t>(n.left), box);
    iv = saved;
    iv.lo = std::max(saved.lo, cut + 1);
    rec(static_cast<std::size_t>(n.right), box);
    iv = saved;
  };
  Hyperrectangle box = Hyperrectangle::whole(space);
  rec(0, box);
  return out;
}

}  // namespace dfx
