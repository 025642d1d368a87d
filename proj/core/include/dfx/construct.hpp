#pragma once

#include <cstddef>
#include <vector>

#include "dfx/ensemble.hpp"
#include "dfx/lattice.hpp"

namespace dfx {

/// Deep tree computing (-1)^{|x|_1} exactly on [p]^n.
///
/// Stage 1 walks x_1 through 1..p with one layer per value; stage d >= 2 first
/// flips the running parity (the x_d = 1 step) and then adds one layer per
/// further value of x_d. Each layer reads the previous label as feature n+1
/// through threshold 0. Total dim is at most 10pn.
DeepTree build_parity_deeptree(int p, int n);

/// Layers of the first stage only, h^(1,q) for q = 1..p; dim <= 7q.
DeepTree parity_first_stage(int p, int n, int q);

struct LeafBox {
  Hyperrectangle box;  // integer bounds a_i..b_i
  int label = 0;
};

/// Leaves of a +/-1 tree split by label, both in preorder.
struct LeafList {
  std::vector<LeafBox> positive;
  std::vector<LeafBox> negative;
};

/// Throws NonLatticeThreshold unless every threshold t has floor(t) in [1, p-1].
LeafList extract_leaf_lists(const Tree& source, const LatticeSpace& space);

struct CompileReport {
  std::size_t positive_leaves = 0;  // D+
  std::size_t negative_leaves = 0;  // D-
  int chosen_label = 0;             // leaf class the cascade is built from; 0 for constant sources
  int source_dim = 0;
  int compiled_dim = 0;
  int formula_dim = 0;  // (6n+4)min{D+,D-} - 3, or 1 for constant sources
  int bound_dim = 0;    // (4n+1) dim(source)
  bool within_bound = false;
};

struct CompileResult {
  DeepTree model;
  CompileReport report;
};

/// Rewrites a lattice tree as a restricted deep tree with one layer per leaf
/// of its minority class (ties go to the positive class). Every layer fits
/// the H_T-restricted budget and the result agrees with source on [p]^n.
CompileResult compile_to_deeptree(const Tree& source, const LatticeSpace& space);

}  // namespace dfx
