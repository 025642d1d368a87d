#include "dfx/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "dfx/error.hpp"
#include "dfx/parallel.hpp"
#include "dfx/rng.hpp"

namespace dfx {

void LabeledDataset::add_row(std::span<const double> x, int label) {
  if (empty() && width == 0) width = x.size();
  if (x.size() != width) throw Error(Errc::MalformedRow, "row width differs from dataset width");
  values.insert(values.end(), x.begin(), x.end());
  labels.push_back(label);
}

std::vector<int> LabeledDataset::classes() const {
  std::vector<int> out(labels);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string LabeledDataset::feature_name(std::size_t j) const {
  return j < feature_names.size() ? feature_names[j] : "x" + std::to_string(j + 1);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> index) const {
  LabeledDataset out;
  out.width = width;
  out.feature_names = feature_names;
  out.values.reserve(index.size() * width);
  out.labels.reserve(index.size());
  for (auto i : index) {
    if (i >= size()) throw Error(Errc::OutOfBounds, "subset index past the end of the dataset");
    const auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

void TrainConfig::validate() const {
  if (max_depth && *max_depth < 0) throw Error(Errc::InvalidArgument, "max_depth must be >= 0");
  if (max_leaves && *max_leaves < 1) throw Error(Errc::InvalidArgument, "max_leaves must be >= 1");
  if (n_trees < 1) throw Error(Errc::InvalidArgument, "n_trees must be >= 1");
  if (cascade_depth < 1) throw Error(Errc::InvalidArgument, "cascade_depth must be >= 1");
}

namespace {

/// Column-major copy of the features, each column's row order presorted by
/// (value, row). Shared read-only by every tree grown on the same data.
struct Presorted {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<std::vector<double>> columns;
  std::vector<std::vector<std::uint32_t>> order;
  std::vector<int> classes;
  std::vector<std::uint16_t> class_index;  // per row

  explicit Presorted(const LabeledDataset& data) : rows(data.size()), width(data.width) {
    if (data.empty()) throw Error(Errc::EmptyDataset, "cannot train on an empty dataset");
    if (width == 0) throw Error(Errc::EmptyDataset, "dataset has no features");
    if (rows > UINT32_MAX) throw Error(Errc::InvalidArgument, "too many rows");
    classes = data.classes();
    class_index.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      class_index[i] = static_cast<std::uint16_t>(
          std::lower_bound(classes.begin(), classes.end(), data.labels[i]) - classes.begin());
    }
    columns.assign(width, std::vector<double>(rows));
    order.assign(width, std::vector<std::uint32_t>(rows));
    for (std::size_t j = 0; j < width; ++j) {
      auto& col = columns[j];
      for (std::size_t i = 0; i < rows; ++i) {
        col[i] = data.values[i * width + j];
        if (std::isnan(col[i])) throw Error(Errc::MalformedRow, "NaN feature value");
      }
      auto& ord = order[j];
      std::iota(ord.begin(), ord.end(), 0u);
      std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
  }
};

struct Split {
  bool valid = false;
  std::size_t feature = 0;  // 0-based
  double threshold = 0.0;
  double improvement = 0.0;  // weighted impurity decrease times node weight
  std::size_t left_rows = 0;
};

struct GrowNode {
  std::size_t begin = 0;
  std::size_t end = 0;
  int depth = 0;
  std::uint64_t key = 0;
  int label = 0;
  double weight = 0.0;
  bool pure = false;
  Split split;
  int left = -1;
  int right = -1;
};

class Grower {
 public:
  Grower(const Presorted& data, std::span<const std::uint32_t> weights, const TrainConfig& cfg,
         FeatureSubsample subsample, std::uint64_t seed)
      : data_(data), weights_(weights), cfg_(cfg), subsample_(subsample), seed_(seed), goes_left_(data.rows, 0) {
    order_.resize(data.width);
    for (std::size_t j = 0; j < data.width; ++j) {
      order_[j].reserve(data.rows);
      for (auto r : data.order[j]) {
        if (weights_[r] > 0) order_[j].push_back(r);
      }
    }
    scratch_.resize(order_[0].size());
    counts_.resize(data.classes.size());
    left_counts_.resize(data.classes.size());
  }

  Tree grow() {
    nodes_.clear();
    make_node(0, order_[0].size(), 0, seed_);
    std::size_t leaves = 1;
    const std::size_t cap = cfg_.max_leaves.value_or(SIZE_MAX);
    // Highest improvement first; equal improvements in creation order.
    auto worse = [this](int a, int b) {
      const double ia = nodes_[static_cast<std::size_t>(a)].split.improvement;
      const double ib = nodes_[static_cast<std::size_t>(b)].split.improvement;
      return ia != ib ? ia < ib : a > b;
    };
    std::priority_queue<int, std::vector<int>, decltype(worse)> frontier(worse);
    if (nodes_[0].split.valid) frontier.push(0);
    while (!frontier.empty() && leaves < cap) {
      const int id = frontier.top();
      frontier.pop();
      apply_split(id);
      ++leaves;
      for (int child : {nodes_[static_cast<std::size_t>(id)].left, nodes_[static_cast<std::size_t>(id)].right}) {
        if (nodes_[static_cast<std::size_t>(child)].split.valid) frontier.push(child);
      }
    }
    std::vector<TreeNode> out;
    out.reserve(nodes_.size());
    emit(0, out);
    return Tree::from_nodes(std::move(out));
  }

 private:
  int make_node(std::size_t begin, std::size_t end, int depth, std::uint64_t key) {
    GrowNode node;
    node.begin = begin;
    node.end = end;
    node.depth = depth;
    node.key = key;
    std::fill(counts_.begin(), counts_.end(), 0.0);
    const auto& ord = order_[0];
    for (std::size_t i = begin; i < end; ++i) counts_[data_.class_index[ord[i]]] += weights_[ord[i]];
    node.weight = std::accumulate(counts_.begin(), counts_.end(), 0.0);
    std::size_t best = 0;
    std::size_t nonzero = 0;
    for (std::size_t c = 0; c < counts_.size(); ++c) {
      if (counts_[c] > counts_[best]) best = c;
      nonzero += counts_[c] > 0;
    }
    node.label = data_.classes[best];
    node.pure = nonzero <= 1;
    const bool depth_ok = !cfg_.max_depth || depth < *cfg_.max_depth;
    const bool leaves_ok = !cfg_.max_leaves || *cfg_.max_leaves > 1;
    if (!node.pure && depth_ok && leaves_ok && node.weight >= static_cast<double>(cfg_.min_samples_split)) {
      node.split = find_split(begin, end, key);
    }
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }

  Split find_split(std::size_t begin, std::size_t end, std::uint64_t key) {
    double parent_sq = 0.0;
    double total = 0.0;
    for (double c : counts_) {
      parent_sq += c * c;
      total += c;
    }
    const std::vector<double> parent_counts = counts_;

    std::vector<std::size_t> candidates(data_.width);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    std::size_t wanted = data_.width;
    Rng rng(combine_seeds(key, 0x5eed));
    if (subsample_ == FeatureSubsample::SqrtD) {
      wanted = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(data_.width))));
    }

    Split best;
    double best_score = 0.0;
    std::size_t found = 0;
    for (std::size_t drawn = 0; drawn < candidates.size() && found < wanted; ++drawn) {
      if (subsample_ == FeatureSubsample::SqrtD) {
        const std::size_t pick = drawn + static_cast<std::size_t>(rng.below(candidates.size() - drawn));
        std::swap(candidates[drawn], candidates[pick]);
      }
      const std::size_t f = candidates[drawn];
      const auto& ord = order_[f];
      const auto& col = data_.columns[f];
      if (col[ord[begin]] == col[ord[end - 1]]) continue;  // constant here
      ++found;

      std::fill(left_counts_.begin(), left_counts_.end(), 0.0);
      double left_sq = 0.0;
      double right_sq = parent_sq;
      double left_w = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        const std::uint32_t r = ord[i];
        const double w = weights_[r];
        const std::size_t c = data_.class_index[r];
        const double lc = left_counts_[c];
        const double rc = parent_counts[c] - lc;
        left_sq += 2.0 * lc * w + w * w;
        right_sq -= 2.0 * rc * w - w * w;
        left_counts_[c] = lc + w;
        left_w += w;
        const double v = col[r];
        const double next = col[ord[i + 1]];
        if (v == next) continue;
        const double score = left_sq / left_w + right_sq / (total - left_w);
        const bool better = !best.valid || score > best_score || (score == best_score && f < best.feature);
        if (better) {
          double threshold = v + (next - v) / 2.0;
          if (threshold >= next || threshold < v) threshold = v;
          best.valid = true;
          best.feature = f;
          best.threshold = threshold;
          best.left_rows = i + 1 - begin;
          best_score = score;
        }
      }
    }
    if (best.valid) best.improvement = std::max(0.0, best_score - parent_sq / total);
    return best;
  }

  void apply_split(int id) {
    GrowNode node = nodes_[static_cast<std::size_t>(id)];
    const Split& s = node.split;
    const auto& col = data_.columns[s.feature];
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t r = order_[0][i];
      goes_left_[r] = col[r] <= s.threshold;
    }
    const std::size_t mid = node.begin + s.left_rows;
    for (auto& ord : order_) {
      std::size_t l = node.begin;
      std::size_t k = 0;
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t r = ord[i];
        if (goes_left_[r]) {
          ord[l++] = r;
        } else {
          scratch_[k++] = r;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(k), ord.begin() + static_cast<std::ptrdiff_t>(l));
    }
    const int left = make_node(node.begin, mid, node.depth + 1, combine_seeds(node.key, 1));
    const int right = make_node(mid, node.end, node.depth + 1, combine_seeds(node.key, 2));
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
  }

  void emit(int id, std::vector<TreeNode>& out) const {
    const GrowNode& node = nodes_[static_cast<std::size_t>(id)];
    const std::size_t at = out.size();
    out.push_back({});
    out[at].label = node.label;
    if (node.left < 0) return;
    out[at].feature = static_cast<int>(node.split.feature + 1);
    out[at].threshold = node.split.threshold;
    out[at].left = static_cast<std::int32_t>(out.size());
    emit(node.left, out);
    out[at].right = static_cast<std::int32_t>(out.size());
    emit(node.right, out);
  }

  const Presorted& data_;
  std::span<const std::uint32_t> weights_;
  const TrainConfig& cfg_;
  FeatureSubsample subsample_;
  std::uint64_t seed_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint32_t> scratch_;
  std::vector<unsigned char> goes_left_;
  std::vector<double> counts_;
  std::vector<double> left_counts_;
  std::vector<GrowNode> nodes_;
};

Tree grow_tree(const Presorted& data, std::span<const std::uint32_t> weights, const TrainConfig& cfg,
               FeatureSubsample subsample, std::uint64_t seed) {
  return Grower(data, weights, cfg, subsample, seed).grow();
}

Forest grow_forest(const Presorted& data, const TrainConfig& cfg, std::uint64_t seed) {
  std::vector<std::optional<Tree>> slots(cfg.n_trees);
  parallel_for(cfg.n_trees, cfg.threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(seed, "forest.tree", t);
    std::vector<std::uint32_t> weights(data.rows, 1);
    if (cfg.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0u);
      Rng rng(derive_seed(tree_seed, "bootstrap"));
      for (std::size_t i = 0; i < data.rows; ++i) ++weights[rng.below(data.rows)];
    }
    slots[t] = grow_tree(data, weights, cfg, cfg.feature_subsample, tree_seed);
  });
  std::vector<Tree> trees;
  trees.reserve(slots.size());
  for (auto& s : slots) trees.push_back(std::move(*s));
  return Forest::unrestricted(std::move(trees));
}

}  // namespace

Tree train_tree(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const Presorted sorted(data);
  const std::vector<std::uint32_t> weights(sorted.rows, 1);
  return grow_tree(sorted, weights, cfg, FeatureSubsample::All, cfg.seed);
}

Forest train_forest(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const Presorted sorted(data);
  return grow_forest(sorted, cfg, cfg.seed);
}

Model train_cascade(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw Error(Errc::EmptyDataset, "cannot train on an empty dataset");
  const std::vector<int> classes = data.classes();
  const bool deep_tree = cfg.layer_kind == LayerKind::Tree && cfg.augment_mode == AugmentMode::Label;
  const std::size_t aug = cfg.augment_mode == AugmentMode::Label ? 1 : classes.size();

  std::vector<Tree> tree_layers;
  std::vector<Forest> forest_layers;
  LabeledDataset current = data;
  current.train_index.clear();
  current.test_index.clear();
  for (std::size_t d = 0; d < cfg.cascade_depth; ++d) {
    const std::uint64_t layer_seed = d == 0 ? cfg.seed : derive_seed(cfg.seed, "cascade.layer", d);
    const Presorted sorted(current);
    std::optional<Forest> layer_forest;
    if (cfg.layer_kind == LayerKind::Tree) {
      const std::vector<std::uint32_t> weights(sorted.rows, 1);
      Tree tree = grow_tree(sorted, weights, cfg, FeatureSubsample::All, layer_seed);
      if (deep_tree) {
        tree_layers.push_back(std::move(tree));
      } else {
        layer_forest = Forest::unrestricted({std::move(tree)});
      }
    } else {
      layer_forest = grow_forest(sorted, cfg, layer_seed);
    }
    if (layer_forest) forest_layers.push_back(*layer_forest);
    if (d + 1 == cfg.cascade_depth) break;

    // Augment the raw training rows with this layer's predictions.
    LabeledDataset next;
    next.width = data.width + aug;
    next.labels = data.labels;
    next.feature_names = data.feature_names;
    for (std::size_t k = 0; k < aug; ++k) {
      next.feature_names.push_back(aug == 1 ? "prev" : "prev_p" + std::to_string(classes[k]));
    }
    next.values.reserve(data.size() * next.width);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto raw = data.row(i);
      const auto seen = current.row(i);
      next.values.insert(next.values.end(), raw.begin(), raw.end());
      if (deep_tree) {
        next.values.push_back(static_cast<double>(tree_layers.back().eval(seen)));
      } else if (cfg.augment_mode == AugmentMode::Label) {
        next.values.push_back(static_cast<double>(layer_forest->eval(seen)));
      } else {
        const auto fractions = layer_forest->vote_fractions(seen, classes);
        next.values.insert(next.values.end(), fractions.begin(), fractions.end());
      }
    }
    if (next.feature_names.size() != next.width) next.feature_names.clear();
    current = std::move(next);
  }
  if (deep_tree) return DeepTree::unrestricted(std::move(tree_layers));
  return DeepForest(std::move(forest_layers), classes, cfg.augment_mode);
}

std::size_t required_width(const Model& model) {
  auto widest = [](const std::vector<Tree>& trees) {
    int w = 0;
    for (const auto& t : trees) w = std::max(w, t.max_feature());
    return static_cast<std::size_t>(w);
  };
  if (const auto* t = std::get_if<Tree>(&model)) return static_cast<std::size_t>(t->max_feature());
  if (const auto* f = std::get_if<Forest>(&model)) return widest(f->trees());
  std::size_t w = 0;
  if (const auto* dt = std::get_if<DeepTree>(&model)) {
    for (std::size_t d = 0; d < dt->layers().size(); ++d) {
      const auto m = static_cast<std::size_t>(dt->layers()[d].max_feature());
      w = std::max(w, d == 0 ? m : (m > 0 ? m - 1 : 0));
    }
    return w;
  }
  const auto& df = std::get<DeepForest>(model);
  for (std::size_t d = 0; d < df.layers().size(); ++d) {
    const std::size_t m = widest(df.layers()[d].trees());
    w = std::max(w, d == 0 ? m : (m > df.augment_width() ? m - df.augment_width() : 0));
  }
  return w;
}

std::vector<int> predict(const Model& model, const LabeledDataset& data) {
  if (data.width < required_width(model)) {
    throw Error(Errc::FeatureOutOfRange, "model reads " + std::to_string(required_width(model)) +
                                             " features but rows have " + std::to_string(data.width));
  }
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(model, data.row(i));
  return out;
}

double accuracy(const Model& model, const LabeledDataset& data) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "accuracy of an empty dataset");
  const auto predicted = predict(model, data);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hits += predicted[i] == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace dfx
