#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dfx/tree.hpp"

namespace dfx {

enum class TieRule { FixedNegative, FixedPositive, SeededUniform };

/// How the mode picks among equally frequent labels. FixedNegative picks the
/// smallest tied label (so -1 for binary), FixedPositive the largest, and
/// SeededUniform a uniformly random one determined by (seed, x).
struct TiePolicy {
  TieRule rule = TieRule::FixedNegative;
  std::uint64_t seed = 0;
};

/// Majority vote over member trees.
class Forest {
 public:
  /// Every member must fit SizeBudget{ambient_dim}; throws BudgetExceeded.
  static Forest restricted(std::vector<Tree> trees, int ambient_dim, TiePolicy tie = {});
  /// No size restriction; used for learned forests.
  static Forest unrestricted(std::vector<Tree> trees, TiePolicy tie = {});

  int eval(std::span<const double> x) const;
  int eval(std::span<const Coord> x) const;

  /// (label, count) sorted by label.
  std::vector<std::pair<int, int>> votes(std::span<const double> x) const;
  /// Fraction of members voting for each entry of classes.
  std::vector<double> vote_fractions(std::span<const double> x, std::span<const int> classes) const;

  const std::vector<Tree>& trees() const noexcept { return trees_; }
  std::size_t size() const noexcept { return trees_.size(); }
  const TiePolicy& tie_policy() const noexcept { return tie_; }
  int dim() const noexcept;
  std::size_t total_leaves() const noexcept;

  friend bool operator==(const Forest& a, const Forest& b) { return a.trees_ == b.trees_; }

 private:
  Forest(std::vector<Tree> trees, TiePolicy tie);

  std::vector<Tree> trees_;
  TiePolicy tie_;
};

/// Cascade h_D (+) ... (+) h_1: layer d >= 2 sees the raw input with the
/// previous layer's label appended as one extra real feature.
class DeepTree {
 public:
  /// Layer 1 must fit SizeBudget{input_dim}, later layers SizeBudget{input_dim + 1}.
  static DeepTree restricted(std::vector<Tree> layers, int input_dim);
  static DeepTree unrestricted(std::vector<Tree> layers);

  int eval(std::span<const double> x) const;
  int eval(std::span<const Coord> x) const;

  const std::vector<Tree>& layers() const noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  int dim() const noexcept;
  std::size_t total_leaves() const noexcept;

  friend bool operator==(const DeepTree&, const DeepTree&) = default;

 private:
  explicit DeepTree(std::vector<Tree> layers);

  std::vector<Tree> layers_;
};

enum class AugmentMode { Label, ClassVector };

/// Cascade of forests. ClassVector appends per-class vote fractions of the
/// previous layer (in `classes` order); Label appends its majority label.
class DeepForest {
 public:
  DeepForest(std::vector<Forest> layers, std::vector<int> classes, AugmentMode mode);

  int eval(std::span<const double> x) const;

  const std::vector<Forest>& layers() const noexcept { return layers_; }
  const std::vector<int>& classes() const noexcept { return classes_; }
  AugmentMode mode() const noexcept { return mode_; }
  std::size_t augment_width() const noexcept { return mode_ == AugmentMode::Label ? 1 : classes_.size(); }
  int dim() const noexcept;
  std::size_t total_leaves() const noexcept;

  friend bool operator==(const DeepForest&, const DeepForest&) = default;

 private:
  std::vector<Forest> layers_;
  std::vector<int> classes_;
  AugmentMode mode_;
};

using Model = std::variant<Tree, Forest, DeepTree, DeepForest>;

int predict(const Model& model, std::span<const double> x);
int predict(const Model& model, std::span<const Coord> x);
/// Sum of member dims.
int ensemble_dim(const Model& model);
std::size_t total_leaves(const Model& model);
std::string model_kind(const Model& model);

/// Throws BudgetExceeded when any member of a forest or cascade falls outside
/// its H_T-restricted budget for raw input dimension input_dim. Single trees
/// are unrestricted and always pass.
void check_budget(const Model& model, int input_dim);

}  // namespace dfx
