#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfx/lattice.hpp"
#include "dfx/learn.hpp"

namespace dfx {

enum class ExperimentId { Sim, Gini, Bounds, Uci };

ExperimentId parse_experiment_id(const std::string& s);
std::string to_string(ExperimentId id);

struct SimSettings {
  std::vector<int> dims{2, 4, 8};
  std::uint64_t sample_count = 100'000;
  Rational a{3, 1};
  std::vector<int> depths{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::vector<std::string> models{"T", "DT-2", "DT-3", "DT-4", "RF-9", "RF-19", "RF-29"};
  double target_accuracy = 0.99;
};

struct GiniSettings {
  std::vector<int> dims{2, 3, 4, 5, 6};
  std::vector<Rational> a_values{{3, 1}, {2, 1}};
};

struct BoundsSettings {
  std::vector<int> p_values{2, 3, 4};
  int n_max = 8;
  std::size_t random_trees = 100;
  std::size_t error_set_trees = 1000;
};

struct UciSettings {
  std::vector<std::string> datasets{"pendigits", "satimage", "segment"};
  std::vector<std::size_t> rf_trees{50, 100, 200, 400, 800, 1600};
  std::vector<std::size_t> df_trees{25, 50, 100, 200, 400, 800};  // per layer
  std::size_t df_layers = 2;
  std::vector<std::size_t> tree_sizes{8, 16, 32};
  std::string manifest = "data/uci_manifest.ini";
  std::string cache_dir;  // empty: DFX_CACHE_DIR or ./cache
  bool offline = false;
};

struct ExperimentConfig {
  ExperimentId id = ExperimentId::Sim;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  unsigned threads = 1;
  bool record_wall_time = false;
  SimSettings sim;
  GiniSettings gini;
  BoundsSettings bounds;
  UciSettings uci;

  /// Throws InvalidArgument on empty grids or bad values.
  void validate() const;
};

/// INI text: a [experiment] section (id, seed, output_dir, threads,
/// wall_time) plus optional [sim], [gini], [bounds] and [uci] sections.
/// Lists are comma separated. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

/// [train] section with TrainConfig's knobs: max_depth, max_leaves,
/// min_samples_split, seed, n_trees, feature_subsample (all|sqrt), bootstrap,
/// cascade_depth, augment_mode (label|class-vector), threads.
TrainConfig parse_train_config(const std::string& text);
TrainConfig read_train_config(const std::filesystem::path& path);

/// "desk" keeps the defaults above; "paper" raises sample counts and the
/// Gini trace to n = 8.
void apply_scale(ExperimentConfig& cfg, const std::string& scale);

}  // namespace dfx
