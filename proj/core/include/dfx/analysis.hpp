#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dfx/ensemble.hpp"
#include "dfx/lattice.hpp"

namespace dfx {

using BigRational = boost::multiprecision::cpp_rational;

inline constexpr std::uint64_t kExhaustiveCap = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kOracleCap = 64;

// ---------------------------------------------------------------------------
// Label-connected partition

/// Classes of the graph joining points at L1 distance <= r that share a label.
struct LabelPartition {
  std::vector<std::uint32_t> class_of;             // per lattice index
  std::vector<std::vector<std::uint64_t>> classes;  // lattice indices, ascending
  std::vector<int> labels;                          // per class

  std::size_t size() const noexcept { return classes.size(); }
  std::size_t count_with_label(int label) const noexcept;
};

LabelPartition label_partition(const LatticeSpace& space, const Concept& target, int r,
                               std::uint64_t cap = kExhaustiveCap);

/// Structural check of a partition, computed without the union-find that
/// built it: classes cover the lattice disjointly, each class is connected
/// under same-label r-steps, and no same-label r-step crosses two classes.
struct PartitionCheck {
  bool covers_disjointly = false;
  bool classes_connected = false;
  bool maximal = false;
  bool ok() const noexcept { return covers_disjointly && classes_connected && maximal; }
};

PartitionCheck verify_partition(const LabelPartition& partition, const LatticeSpace& space, const Concept& target,
                                int r);

// ---------------------------------------------------------------------------
// Error / proper sets

struct RiskReport {
  std::uint64_t error_set_size = 0;
  std::uint64_t proper_set_size = 0;
  double exact_risk = 0.0;
  BigInt error_weight = 0;  // exact_risk = error_weight / total_weight
  BigInt total_weight = 1;
  std::size_t leaf_count = 0;
};

RiskReport risk_report(const Model& model, const Concept& target, const LatticeDistribution& dist,
                       const LatticeSpace& space, std::uint64_t cap = kExhaustiveCap);

// ---------------------------------------------------------------------------
// Approximation complexity of single trees, by exhaustive search

struct OracleOptions {
  std::size_t max_leaves = 8;
  std::uint64_t point_cap = kOracleCap;
  std::uint64_t node_budget = 50'000'000;  // split evaluations
};

struct ComplexityResult {
  std::string family = "T";
  std::string target;
  std::string distribution;
  double epsilon = 0.0;
  bool found = false;
  std::size_t minimal_leaves = 0;
  int minimal_dim = 0;
  std::optional<Tree> witness;
  double witness_risk = 0.0;
  /// True when every tree with at most max_leaves leaves and integer cuts was
  /// covered and a witness was found, so nothing smaller reaches epsilon.
  bool search_exhaustive = false;
  std::uint64_t splits_evaluated = 0;
};

/// Smallest tree (by leaf count, hence dim) whose risk under dist is at most
/// epsilon. Splits are restricted to integer cuts x_i <= q, q in [1, p-1],
/// which loses nothing on a lattice.
ComplexityResult tree_complexity_oracle(const LatticeSpace& space, const Concept& target,
                                        const LatticeDistribution& dist, double epsilon,
                                        const OracleOptions& options = {});

/// Minimal error weight reachable with at most k leaves, for k = 1..max_leaves.
std::vector<BigInt> oracle_error_profile(const LatticeSpace& space, const Concept& target,
                                         const LatticeDistribution& dist, const OracleOptions& options = {});

// ---------------------------------------------------------------------------
// Forest leaf lower bound for zero-error parity

struct LeafBoundCheck {
  std::uint64_t total_leaves = 0;
  std::uint64_t bound = 0;  // p^n
  bool holds = false;
};

/// Requires every point to get a strict majority of correct votes; throws
/// PreconditionViolated otherwise. Then reports sum of leaves vs p^n.
LeafBoundCheck forest_zero_error_leafbound(const Forest& forest, const Concept& target, const LatticeSpace& space,
                                           std::uint64_t cap = kExhaustiveCap);

// ---------------------------------------------------------------------------
// Exact Gini gains

struct GainEntry {
  int feature = 0;  // 1-based
  int cut = 0;      // left child takes x_feature <= cut
  BigRational gain;
  double value() const { return gain.convert_to<double>(); }
};

struct GainMap {
  Hyperrectangle region;
  BigRational parent_impurity;
  std::vector<GainEntry> entries;  // by feature, then cut
  std::optional<std::size_t> argmax;  // first maximal entry

  bool all_zero() const;
};

/// Gini impurity 1 - sum_k q_k^2 of the conditional class masses, and gain =
/// parent impurity minus mass-weighted child impurity, for every integer cut
/// of every feature of region. Exact. Throws EmptyRegion on zero mass.
GainMap gini_gain_map(const LatticeSpace& space, const LatticeDistribution& dist, const Concept& target,
                      const Hyperrectangle& region, std::uint64_t cap = kExhaustiveCap);

struct SplitTraceNode {
  int layer = 1;  // root is layer 1
  std::string path;  // "" for root, then L/R steps
  Hyperrectangle region;
  int feature = 0;
  int cut = 0;
  double gain = 0.0;
  bool positive_gain = false;
  bool at_midpoint = false;
  bool same_feature_as_parent = false;
};

struct SplitTrace {
  std::vector<SplitTraceNode> nodes;  // breadth-first
  bool midpoints = false;
  bool even_layers_repeat_parent = false;
  bool layers_agree = false;  // every node on a layer picks the same feature
  bool gains_positive = false;
  bool pass() const noexcept { return midpoints && even_layers_repeat_parent && layers_agree && gains_positive; }
};

/// Follows the exact argmax split from the full lattice down `depth` layers.
SplitTrace gini_split_trace(const LatticeSpace& space, const LatticeDistribution& dist, const Concept& target,
                            int depth, std::uint64_t cap = kExhaustiveCap);

}  // namespace dfx
