#include "dfx/construct.hpp"

#include <cmath>

#include "dfx/error.hpp"

namespace dfx {

namespace {

Tree stage_one_layer(int n, int q) {
  // (1, q-1, n+1, 0, -1, +1, (-1)^q)
  const Tree copy_previous = Tree::node(n + 1, 0.0, Tree::leaf(-1), Tree::leaf(+1));
  return Tree::node(1, q - 1, copy_previous, Tree::leaf(q % 2 == 0 ? +1 : -1));
}

Tree flip_layer(int n) {
  // (n+1, 0, +1, -1)
  return Tree::node(n + 1, 0.0, Tree::leaf(+1), Tree::leaf(-1));
}

Tree stage_layer(int n, int d, int q) {
  // (d, q-1, n+1, 0, -1, +1, n+1, 0, +1, -1)
  const Tree copy_previous = Tree::node(n + 1, 0.0, Tree::leaf(-1), Tree::leaf(+1));
  return Tree::node(d, q - 1, copy_previous, flip_layer(n));
}

void check_parity_args(int p, int n) {
  if (p < 1 || n < 1) throw Error(Errc::InvalidArgument, "parity construction needs p >= 1 and n >= 1");
}

// Indicator of one box as a chain over features q..n:
// (q, a_q - 1, in_label', Node(q, b_q, rest, out), out) with in_label' = out.
Tree box_indicator(const Hyperrectangle& box, int in_label) {
  const int out_label = -in_label;
  Tree rest = Tree::leaf(in_label);
  for (int q = static_cast<int>(box.bounds.size()); q >= 1; --q) {
    const Interval& iv = box.bounds[static_cast<std::size_t>(q - 1)];
    const Tree upper = Tree::node(q, iv.hi, rest, Tree::leaf(out_label));
    rest = Tree::node(q, iv.lo - 1, Tree::leaf(out_label), upper);
  }
  return rest;
}

}  // namespace

DeepTree parity_first_stage(int p, int n, int q) {
  check_parity_args(p, n);
  if (q < 1 || q > p) throw Error(Errc::InvalidArgument, "q must be in [1, p]");
  std::vector<Tree> layers;
  layers.push_back(Tree::leaf(-1));
  for (int k = 2; k <= q; ++k) layers.push_back(stage_one_layer(n, k));
  return DeepTree::restricted(std::move(layers), n);
}

DeepTree build_parity_deeptree(int p, int n) {
  check_parity_args(p, n);
  std::vector<Tree> layers;
  layers.push_back(Tree::leaf(-1));
  for (int q = 2; q <= p; ++q) layers.push_back(stage_one_layer(n, q));
  for (int d = 2; d <= n; ++d) {
    layers.push_back(flip_layer(n));
    for (int q = 2; q <= p; ++q) layers.push_back(stage_layer(n, d, q));
  }
  return DeepTree::restricted(std::move(layers), n);
}

LeafList extract_leaf_lists(const Tree& source, const LatticeSpace& space) {
  for (const auto& node : source.nodes()) {
    if (node.is_leaf()) {
      if (node.label != 1 && node.label != -1) {
        throw Error(Errc::LabelDomainError, "compilation needs +1/-1 leaf labels");
      }
      continue;
    }
    if (node.feature > space.dim()) {
      throw Error(Errc::FeatureOutOfRange, "source tree reads feature " + std::to_string(node.feature));
    }
    const double cut = std::floor(node.threshold);
    if (cut < 1.0 || cut > space.cardinality() - 1.0) {
      throw Error(Errc::NonLatticeThreshold, "threshold " + std::to_string(node.threshold) +
                                                 " does not cut between lattice values of [" +
                                                 std::to_string(space.cardinality()) + "]");
    }
  }
  LeafList lists;
  for (auto& region : leaf_regions(source, space)) {
    auto& target = region.label > 0 ? lists.positive : lists.negative;
    target.push_back({std::move(region.box), region.label});
  }
  return lists;
}

CompileResult compile_to_deeptree(const Tree& source, const LatticeSpace& space) {
  const LeafList lists = extract_leaf_lists(source, space);
  const int n = space.dim();
  CompileReport report;
  report.positive_leaves = lists.positive.size();
  report.negative_leaves = lists.negative.size();
  report.source_dim = source.dim();
  report.bound_dim = (4 * n + 1) * source.dim();

  std::vector<Tree> layers;
  if (lists.positive.empty() || lists.negative.empty()) {
    report.chosen_label = 0;
    report.formula_dim = 1;
    layers.push_back(Tree::leaf(lists.positive.empty() ? -1 : +1));
  } else {
    const bool use_positive = lists.positive.size() <= lists.negative.size();
    const int in_label = use_positive ? +1 : -1;
    const auto& chosen = use_positive ? lists.positive : lists.negative;
    report.chosen_label = in_label;
    report.formula_dim = (6 * n + 4) * static_cast<int>(chosen.size()) - 3;
    layers.push_back(box_indicator(chosen.front().box, in_label));
    for (std::size_t d = 1; d < chosen.size(); ++d) {
      // Points already claimed by an earlier leaf keep in_label; the rest
      // are tested against the next leaf's box.
      const Tree test = box_indicator(chosen[d].box, in_label);
      layers.push_back(in_label > 0 ? Tree::node(n + 1, 0.0, test, Tree::leaf(+1))
                                    : Tree::node(n + 1, 0.0, Tree::leaf(-1), test));
    }
  }
  CompileResult result{DeepTree::restricted(std::move(layers), n), report};
  result.report.compiled_dim = result.model.dim();
  result.report.within_bound = result.report.compiled_dim <= result.report.bound_dim;
  return result;
}

}  // namespace dfx
