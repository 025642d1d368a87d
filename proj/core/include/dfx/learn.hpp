#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfx/ensemble.hpp"

namespace dfx {

/// Row-major real features with integer labels (+1/-1 or class ids).
struct LabeledDataset {
  std::size_t width = 0;
  std::vector<double> values;  // size() * width
  std::vector<int> labels;
  std::vector<std::string> feature_names;  // empty means x1..xw
  // Optional predefined split; both empty when absent.
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  bool has_split() const noexcept { return !train_index.empty() || !test_index.empty(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * width, width}; }
  void add_row(std::span<const double> x, int label);
  /// Sorted distinct labels.
  std::vector<int> classes() const;
  std::string feature_name(std::size_t j) const;

  /// Rows at the given positions, in that order, without split indices.
  LabeledDataset subset(std::span<const std::size_t> index) const;
  LabeledDataset train() const { return subset(train_index); }
  LabeledDataset test() const { return subset(test_index); }
};

enum class FeatureSubsample { All, SqrtD };
enum class LayerKind { Tree, Forest };

struct TrainConfig {
  std::optional<int> max_depth;
  std::optional<std::size_t> max_leaves;  // per tree
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 0;
  std::size_t n_trees = 100;
  FeatureSubsample feature_subsample = FeatureSubsample::SqrtD;  // forests only
  bool bootstrap = true;                                          // forests only
  std::size_t cascade_depth = 1;
  AugmentMode augment_mode = AugmentMode::Label;
  LayerKind layer_kind = LayerKind::Tree;
  unsigned threads = 1;

  /// Throws InvalidArgument on out-of-range knobs.
  void validate() const;
};

/// Greedy CART with Gini gain on every feature. Cuts sit at midpoints between
/// consecutive distinct values. With max_leaves the highest-gain leaf is split
/// first, so a smaller budget yields a prefix of the same growth sequence.
/// Labels of leaves are the weighted majority, ties to the lowest class.
Tree train_tree(const LabeledDataset& data, const TrainConfig& cfg);

/// Bagged trees with per-node feature subsampling. Each tree draws from its
/// own stream derived from (seed, tree index), so the thread count does not
/// change the result.
Forest train_forest(const LabeledDataset& data, const TrainConfig& cfg);

/// Layer 1 sees the raw features; layer d sees them plus the augmentation of
/// layer d-1's predictions on the training rows. Tree layers with Label
/// augmentation produce a DeepTree, anything else a DeepForest.
Model train_cascade(const LabeledDataset& data, const TrainConfig& cfg);

/// Number of raw features the model reads. Evaluating on narrower rows is an
/// error.
std::size_t required_width(const Model& model);

std::vector<int> predict(const Model& model, const LabeledDataset& data);
double accuracy(const Model& model, const LabeledDataset& data);

}  // namespace dfx
