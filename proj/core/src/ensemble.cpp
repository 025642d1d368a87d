#include "dfx/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <numeric>

#include "dfx/error.hpp"
#include "dfx/rng.hpp"

namespace dfx {

namespace {

std::uint64_t hash_input(std::uint64_t seed, std::span<const double> x) {
  std::uint64_t h = mix64(seed);
  for (double v : x) {
    if (v == 0.0) v = 0.0;  // fold -0.0
    h = combine_seeds(h, std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

void require_budget(const Tree& tree, int ambient_dim, const char* what, std::size_t index) {
  const SizeBudget budget{ambient_dim};
  if (!budget.admits(tree)) {
    throw Error(Errc::BudgetExceeded, std::string(what) + " " + std::to_string(index + 1) + " has dim " +
                                          std::to_string(tree.dim()) + " > " + std::to_string(budget.max_dim()));
  }
}

}  // namespace

Forest::Forest(std::vector<Tree> trees, TiePolicy tie) : trees_(std::move(trees)), tie_(tie) {
  if (trees_.empty()) throw Error(Errc::InvalidArgument, "forest needs at least one tree");
}

Forest Forest::restricted(std::vector<Tree> trees, int ambient_dim, TiePolicy tie) {
  for (std::size_t i = 0; i < trees.size(); ++i) require_budget(trees[i], ambient_dim, "forest tree", i);
  return Forest(std::move(trees), tie);
}

Forest Forest::unrestricted(std::vector<Tree> trees, TiePolicy tie) { return Forest(std::move(trees), tie); }

std::vector<std::pair<int, int>> Forest::votes(std::span<const double> x) const {
  std::vector<std::pair<int, int>> tally;
  for (const auto& tree : trees_) {
    const int y = tree.eval(x);
    auto it = std::lower_bound(tally.begin(), tally.end(), y, [](const auto& p, int v) { return p.first < v; });
    if (it != tally.end() && it->first == y) {
      ++it->second;
    } else {
      tally.insert(it, {y, 1});
    }
  }
  return tally;
}

std::vector<double> Forest::vote_fractions(std::span<const double> x, std::span<const int> classes) const {
  std::vector<double> out(classes.size(), 0.0);
  const double n = static_cast<double>(trees_.size());
  for (const auto& [label, count] : votes(x)) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it != classes.end()) out[static_cast<std::size_t>(it - classes.begin())] = count / n;
  }
  return out;
}

int Forest::eval(std::span<const double> x) const {
  const auto tally = votes(x);
  int best = 0;
  for (const auto& v : tally) best = std::max(best, v.second);
  std::vector<int> modes;
  for (const auto& v : tally) {
    if (v.second == best) modes.push_back(v.first);
  }
  if (modes.size() == 1) return modes.front();
  switch (tie_.rule) {
    case TieRule::FixedNegative: return modes.front();
    case TieRule::FixedPositive: return modes.back();
    case TieRule::SeededUniform: return modes[hash_input(tie_.seed, x) % modes.size()];
  }
  return modes.front();
}

int Forest::eval(std::span<const Coord> x) const {
  const auto real = to_real(x);
  return eval(std::span<const double>(real));
}

int Forest::dim() const noexcept {
  return std::accumulate(trees_.begin(), trees_.end(), 0, [](int s, const Tree& t) { return s + t.dim(); });
}

std::size_t Forest::total_leaves() const noexcept {
  return std::accumulate(trees_.begin(), trees_.end(), std::size_t{0},
                         [](std::size_t s, const Tree& t) { return s + t.leaf_count(); });
}

DeepTree::DeepTree(std::vector<Tree> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(Errc::InvalidArgument, "deep tree needs at least one layer");
}

DeepTree DeepTree::restricted(std::vector<Tree> layers, int input_dim) {
  for (std::size_t d = 0; d < layers.size(); ++d) {
    require_budget(layers[d], d == 0 ? input_dim : input_dim + 1, "layer", d);
    const int width = d == 0 ? input_dim : input_dim + 1;
    if (layers[d].max_feature() > width) {
      throw Error(Errc::FeatureOutOfRange, "layer " + std::to_string(d + 1) + " reads feature " +
                                               std::to_string(layers[d].max_feature()) + " beyond " +
                                               std::to_string(width));
    }
  }
  return DeepTree(std::move(layers));
}

DeepTree DeepTree::unrestricted(std::vector<Tree> layers) { return DeepTree(std::move(layers)); }

int DeepTree::eval(std::span<const double> x) const {
  int y = layers_.front().eval(x);
  if (layers_.size() == 1) return y;
  std::vector<double> augmented(x.begin(), x.end());
  augmented.push_back(0.0);
  for (std::size_t d = 1; d < layers_.size(); ++d) {
    augmented.back() = static_cast<double>(y);
    y = layers_[d].eval(std::span<const double>(augmented));
  }
  return y;
}

int DeepTree::eval(std::span<const Coord> x) const {
  const auto real = to_real(x);
  return eval(std::span<const double>(real));
}

int DeepTree::dim() const noexcept {
  return std::accumulate(layers_.begin(), layers_.end(), 0, [](int s, const Tree& t) { return s + t.dim(); });
}

std::size_t DeepTree::total_leaves() const noexcept {
  return std::accumulate(layers_.begin(), layers_.end(), std::size_t{0},
                         [](std::size_t s, const Tree& t) { return s + t.leaf_count(); });
}

DeepForest::DeepForest(std::vector<Forest> layers, std::vector<int> classes, AugmentMode mode)
    : layers_(std::move(layers)), classes_(std::move(classes)), mode_(mode) {
  if (layers_.empty()) throw Error(Errc::InvalidArgument, "deep forest needs at least one layer");
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  if (classes_.empty()) throw Error(Errc::InvalidArgument, "deep forest needs a class list");
}

int DeepForest::eval(std::span<const double> x) const {
  std::vector<double> features(x.begin(), x.end());
  for (std::size_t d = 0;; ++d) {
    const Forest& layer = layers_[d];
    if (d + 1 == layers_.size()) return layer.eval(std::span<const double>(features));
    std::vector<double> next(x.begin(), x.end());
    if (mode_ == AugmentMode::Label) {
      next.push_back(static_cast<double>(layer.eval(std::span<const double>(features))));
    } else {
      const auto fractions = layer.vote_fractions(std::span<const double>(features), classes_);
      next.insert(next.end(), fractions.begin(), fractions.end());
    }
    features = std::move(next);
  }
}

int DeepForest::dim() const noexcept {
  return std::accumulate(layers_.begin(), layers_.end(), 0, [](int s, const Forest& f) { return s + f.dim(); });
}

std::size_t DeepForest::total_leaves() const noexcept {
  return std::accumulate(layers_.begin(), layers_.end(), std::size_t{0},
                         [](std::size_t s, const Forest& f) { return s + f.total_leaves(); });
}

int predict(const Model& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.eval(x); }, model);
}

int predict(const Model& model, std::span<const Coord> x) {
  const auto real = to_real(x);
  return predict(model, std::span<const double>(real));
}

int ensemble_dim(const Model& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

std::size_t total_leaves(const Model& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Tree>) {
          return m.leaf_count();
        } else {
          return m.total_leaves();
        }
      },
      model);
}

std::string model_kind(const Model& model) {
  switch (model.index()) {
    case 0: return "tree";
    case 1: return "forest";
    case 2: return "cascade";
    case 3: return "deep-forest";
  }
  return "?";
}

void check_budget(const Model& model, int input_dim) {
  if (const auto* f = std::get_if<Forest>(&model)) {
    for (std::size_t i = 0; i < f->trees().size(); ++i) require_budget(f->trees()[i], input_dim, "forest tree", i);
  } else if (const auto* dt = std::get_if<DeepTree>(&model)) {
    for (std::size_t d = 0; d < dt->layers().size(); ++d) {
      require_budget(dt->layers()[d], d == 0 ? input_dim : input_dim + 1, "layer", d);
    }
  } else if (const auto* df = std::get_if<DeepForest>(&model)) {
    const int aug = static_cast<int>(df->augment_width());
    for (std::size_t d = 0; d < df->layers().size(); ++d) {
      for (std::size_t i = 0; i < df->layers()[d].trees().size(); ++i) {
        require_budget(df->layers()[d].trees()[i], d == 0 ? input_dim : input_dim + aug, "deep forest tree", i);
      }
    }
  }
}

}  // namespace dfx
