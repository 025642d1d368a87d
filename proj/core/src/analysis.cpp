#include "dfx/analysis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>

#include "dfx/error.hpp"

namespace dfx {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

/// Nonzero offsets with |delta|_1 <= r, each dimension in [-r, r].
std::vector<std::vector<int>> offsets_within(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> delta(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int budget) {
    if (i == n) {
      if (std::any_of(delta.begin(), delta.end(), [](int d) { return d != 0; })) out.push_back(delta);
      return;
    }
    for (int d = -budget; d <= budget; ++d) {
      delta[static_cast<std::size_t>(i)] = d;
      rec(i + 1, budget - std::abs(d));
    }
    delta[static_cast<std::size_t>(i)] = 0;
  };
  rec(0, r);
  return out;
}

template <class Visit>
void for_each_neighbor(const LatticeSpace& space, const Point& x, const std::vector<std::vector<int>>& offsets,
                       Point& scratch, Visit&& visit) {
  for (const auto& delta : offsets) {
    bool inside = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int v = x[i] + delta[i];
      if (v < 1 || v > space.cardinality()) {
        inside = false;
        break;
      }
      scratch[i] = static_cast<Coord>(v);
    }
    if (inside) visit(scratch);
  }
}

void for_each_in_box(const Hyperrectangle& box, const std::function<void(const Point&)>& visit) {
  if (box.volume() == 0) return;
  Point x(box.bounds.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<Coord>(box.bounds[i].lo);
  for (;;) {
    visit(x);
    std::size_t i = x.size();
    for (;;) {
      if (i == 0) return;
      --i;
      if (x[i] < box.bounds[i].hi) {
        ++x[i];
        break;
      }
      x[i] = static_cast<Coord>(box.bounds[i].lo);
    }
  }
}

std::vector<std::vector<BigInt>> weight_tables(const LatticeDistribution& dist, const LatticeSpace& space) {
  std::vector<std::vector<BigInt>> tables;
  for (int i = 1; i <= space.dim(); ++i) tables.push_back(dist.dimension_weights(space, i));
  return tables;
}

BigInt point_weight(const std::vector<std::vector<BigInt>>& tables, const Point& x) {
  BigInt w = 1;
  for (std::size_t i = 0; i < x.size(); ++i) w *= tables[i][x[i] - 1u];
  return w;
}

BigRational gini(const BigInt& pos, const BigInt& neg) {
  const BigInt total = pos + neg;
  if (total == 0) return 0;
  return BigRational(2 * pos * neg, total * total);
}

}  // namespace

std::size_t LabelPartition::count_with_label(int label) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

LabelPartition label_partition(const LatticeSpace& space, const Concept& target, int r, std::uint64_t cap) {
  if (r < 1) throw Error(Errc::InvalidArgument, "connectivity radius r must be >= 1");
  space.require_enumerable(cap);
  const auto total = static_cast<std::size_t>(space.size());
  std::vector<int> label(total);
  for_each_point(space, [&](const Point& x) { label[space.index_of(x)] = target.label(space, x); }, cap);

  const auto offsets = offsets_within(space.dim(), r);
  DisjointSets sets(total);
  Point scratch(static_cast<std::size_t>(space.dim()));
  for_each_point(
      space,
      [&](const Point& x) {
        const auto i = static_cast<std::size_t>(space.index_of(x));
        for_each_neighbor(space, x, offsets, scratch, [&](const Point& y) {
          const auto j = static_cast<std::size_t>(space.index_of(y));
          if (j > i && label[i] == label[j]) sets.unite(i, j);
        });
      },
      cap);

  LabelPartition out;
  out.class_of.assign(total, 0);
  std::vector<std::int64_t> class_of_root(total, -1);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t root = sets.find(i);
    if (class_of_root[root] < 0) {
      class_of_root[root] = static_cast<std::int64_t>(out.classes.size());
      out.classes.emplace_back();
      out.labels.push_back(label[i]);
    }
    const auto c = static_cast<std::size_t>(class_of_root[root]);
    out.class_of[i] = static_cast<std::uint32_t>(c);
    out.classes[c].push_back(i);
  }
  return out;
}

PartitionCheck verify_partition(const LabelPartition& partition, const LatticeSpace& space, const Concept& target,
                                int r) {
  PartitionCheck check;
  const auto total = static_cast<std::size_t>(space.size());
  std::vector<int> seen(total, 0);
  bool disjoint = partition.class_of.size() == total;
  for (std::size_t c = 0; c < partition.classes.size() && disjoint; ++c) {
    for (auto i : partition.classes[c]) {
      if (i >= total || seen[i]++ || partition.class_of[i] != c) disjoint = false;
    }
  }
  check.covers_disjointly = disjoint && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
  if (!check.covers_disjointly) return check;

  const auto offsets = offsets_within(space.dim(), r);
  Point scratch(static_cast<std::size_t>(space.dim()));

  // Breadth-first search inside each class.
  bool connected = true;
  std::vector<char> reached(total, 0);
  for (std::size_t c = 0; c < partition.classes.size() && connected; ++c) {
    const auto& members = partition.classes[c];
    std::deque<std::uint64_t> queue{members.front()};
    reached[members.front()] = 1;
    std::size_t count = 0;
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      ++count;
      const Point x = space.point_at(i);
      for_each_neighbor(space, x, offsets, scratch, [&](const Point& y) {
        const auto j = space.index_of(y);
        if (!reached[j] && partition.class_of[j] == c && target.label(space, y) == target.label(space, x)) {
          reached[j] = 1;
          queue.push_back(j);
        }
      });
    }
    connected = count == members.size() &&
                std::all_of(members.begin(), members.end(),
                            [&](std::uint64_t i) { return target.label(space, space.point_at(i)) == partition.labels[c]; });
  }
  check.classes_connected = connected;

  bool maximal = true;
  for_each_point(space, [&](const Point& x) {
    if (!maximal) return;
    const auto i = space.index_of(x);
    const int yx = target.label(space, x);
    for_each_neighbor(space, x, offsets, scratch, [&](const Point& y) {
      if (target.label(space, y) == yx && partition.class_of[space.index_of(y)] != partition.class_of[i]) {
        maximal = false;
      }
    });
  });
  check.maximal = maximal;
  return check;
}

RiskReport risk_report(const Model& model, const Concept& target, const LatticeDistribution& dist,
                       const LatticeSpace& space, std::uint64_t cap) {
  space.require_enumerable(cap);
  const auto tables = weight_tables(dist, space);
  RiskReport report;
  report.total_weight = dist.total_weight(space);
  report.leaf_count = total_leaves(model);
  for_each_point(
      space,
      [&](const Point& x) {
        if (predict(model, std::span<const Coord>(x)) != target.label(space, x)) {
          ++report.error_set_size;
          report.error_weight += point_weight(tables, x);
        } else {
          ++report.proper_set_size;
        }
      },
      cap);
  report.exact_risk = BigRational(report.error_weight, report.total_weight).convert_to<double>();
  return report;
}

// ---------------------------------------------------------------------------

namespace {

class TreeOracle {
 public:
  TreeOracle(const LatticeSpace& space, const Concept& target, const LatticeDistribution& dist,
             const OracleOptions& options)
      : space_(space), options_(options), intervals_per_dim_(0) {
    if (options.max_leaves < 1) throw Error(Errc::InvalidArgument, "max_leaves must be >= 1");
    space.require_enumerable(options.point_cap);
    const int p = space.cardinality();
    for (int lo = 1; lo <= p; ++lo) {
      for (int hi = lo; hi <= p; ++hi) intervals_.push_back({lo, hi});
    }
    intervals_per_dim_ = intervals_.size();
    std::size_t regions = 1;
    for (int i = 0; i < space.dim(); ++i) regions *= intervals_per_dim_;
    memo_.resize(regions);
    const auto tables = weight_tables(dist, space);
    points_.reserve(static_cast<std::size_t>(space.size()));
    for_each_point(space, [&](const Point& x) {
      points_.push_back({x, target.label(space, x), point_weight(tables, x)});
      total_ += points_.back().weight;
    });
  }

  const BigInt& total() const { return total_; }
  std::uint64_t splits_evaluated() const { return splits_; }

  std::size_t whole_region() const {
    std::vector<int> codes(static_cast<std::size_t>(space_.dim()), interval_code({1, space_.cardinality()}));
    return encode(codes);
  }

  /// Minimal error weight with at most k leaves in region.
  const BigInt& error(std::size_t region, std::size_t k) {
    solve(region);
    return memo_[region].error[k - 1];
  }

  Tree witness(std::size_t region, std::size_t k) {
    solve(region);
    const Entry& e = memo_[region];
    while (k > 1 && e.error[k - 1] == e.error[k - 2]) --k;
    const Choice& c = e.choice[k - 1];
    if (c.feature == 0) return Tree::leaf(e.leaf_label);
    auto [left, right] = split(region, c.feature, c.cut);
    return Tree::node(c.feature, c.cut, witness(left, c.left_leaves), witness(right, k - c.left_leaves));
  }

 private:
  struct WeightedPoint {
    Point x;
    int label;
    BigInt weight;
  };
  struct Choice {
    int feature = 0;  // 0 = leaf
    int cut = 0;
    std::size_t left_leaves = 0;
  };
  struct Entry {
    bool solved = false;
    std::vector<BigInt> error;
    std::vector<Choice> choice;
    int leaf_label = -1;
  };

  int interval_code(Interval iv) const {
    const auto it = std::find(intervals_.begin(), intervals_.end(), iv);
    return static_cast<int>(it - intervals_.begin());
  }

  std::size_t encode(const std::vector<int>& codes) const {
    std::size_t r = 0;
    for (int c : codes) r = r * intervals_per_dim_ + static_cast<std::size_t>(c);
    return r;
  }

  std::vector<int> decode(std::size_t region) const {
    std::vector<int> codes(static_cast<std::size_t>(space_.dim()));
    for (int i = space_.dim() - 1; i >= 0; --i) {
      codes[static_cast<std::size_t>(i)] = static_cast<int>(region % intervals_per_dim_);
      region /= intervals_per_dim_;
    }
    return codes;
  }

  std::pair<std::size_t, std::size_t> split(std::size_t region, int feature, int cut) const {
    auto codes = decode(region);
    auto& code = codes[static_cast<std::size_t>(feature - 1)];
    const Interval iv = intervals_[static_cast<std::size_t>(code)];
    code = interval_code({iv.lo, cut});
    const std::size_t left = encode(codes);
    code = interval_code({cut + 1, iv.hi});
    return {left, encode(codes)};
  }

  void solve(std::size_t region) {
    Entry& entry = memo_[region];
    if (entry.solved) return;
    const std::size_t k_max = options_.max_leaves;
    const auto codes = decode(region);
    Hyperrectangle box;
    for (int c : codes) box.bounds.push_back(intervals_[static_cast<std::size_t>(c)]);

    BigInt pos = 0;
    BigInt neg = 0;
    for (const auto& wp : points_) {
      if (box.contains(wp.x)) (wp.label > 0 ? pos : neg) += wp.weight;
    }
    std::vector<BigInt> error(k_max, std::min(pos, neg));
    std::vector<Choice> choice(k_max);
    const int leaf_label = pos > neg ? +1 : -1;

    for (int f = 1; f <= space_.dim(); ++f) {
      const Interval iv = box.bounds[static_cast<std::size_t>(f - 1)];
      for (int cut = iv.lo; cut < iv.hi; ++cut) {
        if (++splits_ > options_.node_budget) {
          throw Error(Errc::SearchBudgetExceeded,
                      "tree oracle exceeded " + std::to_string(options_.node_budget) + " split evaluations");
        }
        if (k_max < 2) continue;
        const auto [left, right] = split(region, f, cut);
        solve(left);
        solve(right);
        const auto& le = memo_[left].error;
        const auto& re = memo_[right].error;
        for (std::size_t k = 2; k <= k_max; ++k) {
          for (std::size_t kl = 1; kl < k; ++kl) {
            const BigInt candidate = le[kl - 1] + re[k - kl - 1];
            if (candidate < error[k - 1]) {
              error[k - 1] = candidate;
              choice[k - 1] = {f, cut, kl};
            }
          }
        }
      }
    }
    // At most k leaves: never worse than fewer leaves.
    for (std::size_t k = 2; k <= k_max; ++k) {
      if (error[k - 2] < error[k - 1]) {
        error[k - 1] = error[k - 2];
        choice[k - 1] = choice[k - 2];
      }
    }
    entry.error = std::move(error);
    entry.choice = std::move(choice);
    entry.leaf_label = leaf_label;
    entry.solved = true;
  }

  const LatticeSpace& space_;
  OracleOptions options_;
  std::vector<Interval> intervals_;
  std::size_t intervals_per_dim_;
  std::vector<WeightedPoint> points_;
  BigInt total_ = 0;
  std::vector<Entry> memo_;
  std::uint64_t splits_ = 0;
};

}  // namespace

std::vector<BigInt> oracle_error_profile(const LatticeSpace& space, const Concept& target,
                                         const LatticeDistribution& dist, const OracleOptions& options) {
  TreeOracle oracle(space, target, dist, options);
  std::vector<BigInt> out;
  for (std::size_t k = 1; k <= options.max_leaves; ++k) out.push_back(oracle.error(oracle.whole_region(), k));
  return out;
}

ComplexityResult tree_complexity_oracle(const LatticeSpace& space, const Concept& target,
                                        const LatticeDistribution& dist, double epsilon,
                                        const OracleOptions& options) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(Errc::InvalidArgument, "epsilon must be in [0, 1]");
  TreeOracle oracle(space, target, dist, options);
  ComplexityResult result;
  result.target = target.describe();
  result.distribution = dist.describe();
  result.epsilon = epsilon;
  const BigRational allowed = BigRational(epsilon) * BigRational(oracle.total());
  const std::size_t whole = oracle.whole_region();
  for (std::size_t k = 1; k <= options.max_leaves; ++k) {
    const BigInt& err = oracle.error(whole, k);
    if (BigRational(err) <= allowed) {
      result.found = true;
      result.minimal_leaves = k;
      result.minimal_dim = 3 * static_cast<int>(k - 1) + 1;
      result.witness = oracle.witness(whole, k);
      result.witness_risk = BigRational(err, oracle.total()).convert_to<double>();
      break;
    }
  }
  if (!result.found) {
    result.witness = oracle.witness(whole, options.max_leaves);
    result.witness_risk = BigRational(oracle.error(whole, options.max_leaves), oracle.total()).convert_to<double>();
  }
  result.search_exhaustive = result.found;
  result.splits_evaluated = oracle.splits_evaluated();
  return result;
}

LeafBoundCheck forest_zero_error_leafbound(const Forest& forest, const Concept& target, const LatticeSpace& space,
                                           std::uint64_t cap) {
  if (target.kind() != Concept::Kind::Parity) {
    throw Error(Errc::InvalidArgument, "the forest leaf bound is stated for the parity target");
  }
  space.require_enumerable(cap);
  const std::size_t n_trees = forest.size();
  for_each_point(
      space,
      [&](const Point& x) {
        const auto real = to_real(x);
        const int truth = target.label(space, x);
        std::size_t correct = 0;
        for (const auto& tree : forest.trees()) correct += tree.eval(std::span<const double>(real)) == truth;
        if (2 * correct <= n_trees) {
          throw Error(Errc::PreconditionViolated, "forest lacks a strict correct majority on some lattice point");
        }
      },
      cap);
  LeafBoundCheck check;
  check.total_leaves = forest.total_leaves();
  check.bound = space.size();
  check.holds = check.total_leaves >= check.bound;
  return check;
}

bool GainMap::all_zero() const {
  return std::all_of(entries.begin(), entries.end(), [](const GainEntry& e) { return e.gain == 0; });
}

GainMap gini_gain_map(const LatticeSpace& space, const LatticeDistribution& dist, const Concept& target,
                      const Hyperrectangle& region, std::uint64_t cap) {
  space.require_enumerable(cap);
  if (region.bounds.size() != static_cast<std::size_t>(space.dim())) {
    throw Error(Errc::InvalidArgument, "region dimension does not match the space");
  }
  for (const auto& iv : region.bounds) {
    if (iv.lo < 1 || iv.hi > space.cardinality()) throw Error(Errc::OutOfBounds, "region outside the lattice");
  }
  const auto tables = weight_tables(dist, space);
  const auto n = static_cast<std::size_t>(space.dim());
  const auto p = static_cast<std::size_t>(space.cardinality());
  // bucket[f][v][c]: class-c weight of region points with x_f = v.
  std::vector<std::vector<std::array<BigInt, 2>>> bucket(n, std::vector<std::array<BigInt, 2>>(p + 1));
  std::array<BigInt, 2> parent{0, 0};
  for_each_in_box(region, [&](const Point& x) {
    const BigInt w = point_weight(tables, x);
    const std::size_t c = target.label(space, x) > 0 ? 1 : 0;
    parent[c] += w;
    for (std::size_t f = 0; f < n; ++f) bucket[f][x[f]][c] += w;
  });
  if (parent[0] + parent[1] == 0) throw Error(Errc::EmptyRegion, "region has zero probability mass");

  GainMap map;
  map.region = region;
  map.parent_impurity = gini(parent[1], parent[0]);
  const BigInt total = parent[0] + parent[1];
  for (std::size_t f = 0; f < n; ++f) {
    const Interval iv = region.bounds[f];
    std::array<BigInt, 2> left{0, 0};
    for (int cut = iv.lo; cut < iv.hi; ++cut) {
      left[0] += bucket[f][static_cast<std::size_t>(cut)][0];
      left[1] += bucket[f][static_cast<std::size_t>(cut)][1];
      const BigInt right_neg = parent[0] - left[0];
      const BigInt right_pos = parent[1] - left[1];
      const BigInt wl = left[0] + left[1];
      const BigInt wr = right_neg + right_pos;
      BigRational child = BigRational(wl, total) * gini(left[1], left[0]) +
                          BigRational(wr, total) * gini(right_pos, right_neg);
      map.entries.push_back({static_cast<int>(f + 1), cut, map.parent_impurity - child});
    }
  }
  for (std::size_t i = 0; i < map.entries.size(); ++i) {
    if (!map.argmax || map.entries[i].gain > map.entries[*map.argmax].gain) map.argmax = i;
  }
  return map;
}

SplitTrace gini_split_trace(const LatticeSpace& space, const LatticeDistribution& dist, const Concept& target,
                            int depth, std::uint64_t cap) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "trace depth must be >= 1");
  SplitTrace trace;
  trace.midpoints = trace.even_layers_repeat_parent = trace.layers_agree = trace.gains_positive = true;
  struct Pending {
    Hyperrectangle region;
    int layer;
    std::string path;
    int parent_feature;
  };
  std::deque<Pending> queue{{Hyperrectangle::whole(space), 1, "", 0}};
  std::map<int, int> layer_feature;
  while (!queue.empty()) {
    Pending job = std::move(queue.front());
    queue.pop_front();
    const GainMap map = gini_gain_map(space, dist, target, job.region, cap);
    if (!map.argmax) continue;  // nothing left to split
    const GainEntry& best = map.entries[*map.argmax];
    SplitTraceNode node;
    node.layer = job.layer;
    node.path = job.path;
    node.region = job.region;
    node.feature = best.feature;
    node.cut = best.cut;
    node.gain = best.value();
    node.positive_gain = best.gain > 0;
    const Interval iv = job.region.bounds[static_cast<std::size_t>(best.feature - 1)];
    const int length = iv.hi - iv.lo + 1;
    node.at_midpoint = length % 2 == 0 && best.cut == iv.lo + length / 2 - 1;
    node.same_feature_as_parent = job.parent_feature == best.feature;

    trace.midpoints = trace.midpoints && node.at_midpoint;
    trace.gains_positive = trace.gains_positive && node.positive_gain;
    if (job.layer % 2 == 0) {
      trace.even_layers_repeat_parent = trace.even_layers_repeat_parent && node.same_feature_as_parent;
    }
    const auto [it, inserted] = layer_feature.try_emplace(job.layer, best.feature);
    if (!inserted && it->second != best.feature) trace.layers_agree = false;
    trace.nodes.push_back(node);

    if (job.layer < depth) {
      Hyperrectangle left = job.region;
      Hyperrectangle right = job.region;
      left.bounds[static_cast<std::size_t>(best.feature - 1)].hi = best.cut;
      right.bounds[static_cast<std::size_t>(best.feature - 1)].lo = best.cut + 1;
      queue.push_back({std::move(left), job.layer + 1, job.path + "L", best.feature});
      queue.push_back({std::move(right), job.layer + 1, job.path + "R", best.feature});
    }
  }
  return trace;
}

}  // namespace dfx
