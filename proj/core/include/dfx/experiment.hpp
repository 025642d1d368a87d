#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dfx/config.hpp"
#include "dfx/learn.hpp"

namespace dfx {

struct ResultRow {
  std::string experiment;
  std::string dataset;   // "n=2", "pendigits", ...
  std::string model;     // "T", "DT-2", "RF-9", "RF", "DF-2"
  std::string setting;   // "depth=3", "trees=50"
  std::size_t tree_size = 0;  // per-tree leaf budget; 0 when depth-limited
  std::size_t total_leaves = 0;
  int dim = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> wall_time;  // seconds; written only when recorded
};

using ResultTable = std::vector<ResultRow>;

void write_results_csv(const ResultTable& table, std::ostream& out);
void write_results_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_results_csv(std::istream& in);
ResultTable read_results_csv(const std::filesystem::path& path);

/// Minimum total leaves over rows of one (dataset, model) with test accuracy
/// at least target; nullopt when no row reaches it. In first-seen order.
struct LeavesToTarget {
  std::string dataset;
  std::string model;
  std::optional<std::size_t> leaves;
};

std::vector<LeavesToTarget> summarize_leaves_to_target(const ResultTable& table, double target);
std::optional<std::size_t> leaves_to_target(const std::vector<LeavesToTarget>& summary, const std::string& dataset,
                                            const std::string& model);
void write_summary_csv(const std::vector<LeavesToTarget>& summary, std::ostream& out);

using Progress = std::function<void(const std::string&)>;

/// Trains every (n, model, depth) cell on generated noisy parity data.
ResultTable run_simulation(const ExperimentConfig& cfg, const Progress& progress = {});

/// One model of the simulation grid on given data.
Model train_sim_model(const std::string& model, int depth, const LabeledDataset& train, std::uint64_t seed,
                      unsigned threads);

struct GiniRow {
  int n = 0;
  std::string a;
  std::size_t nodes = 0;
  int root_feature = 0;
  int root_cut = 0;
  bool midpoints = false;
  bool even_layers_repeat_parent = false;
  bool layers_agree = false;
  bool gains_positive = false;
  bool pass = false;
  bool uniform_zero_gain = false;  // all root gains vanish under the uniform distribution
};

std::vector<GiniRow> run_gini_verification(const ExperimentConfig& cfg, const Progress& progress = {});
void write_gini_csv(const std::vector<GiniRow>& rows, std::ostream& out);

struct BoundCheck {
  std::string suite;
  std::string instance;
  std::string measured;
  std::string bound;
  bool pass = false;
};

std::vector<BoundCheck> run_bounds_suite(const ExperimentConfig& cfg, const Progress& progress = {});
void write_bounds_csv(const std::vector<BoundCheck>& rows, std::ostream& out);

/// RF with rf_trees[i] trees against a df_layers-deep forest with df_trees[i]
/// trees per layer, for every tree size. Needs the datasets fetched or cached.
ResultTable run_uci(const ExperimentConfig& cfg, const Progress& progress = {});
ResultTable run_uci_on(const std::string& name, const LabeledDataset& data, const ExperimentConfig& cfg,
                       const Progress& progress = {});

struct UciClaims {
  std::string dataset;
  std::size_t cells = 0;
  std::size_t df_not_worse = 0;      // cells with DF accuracy >= RF accuracy
  std::size_t size_pairs = 0;
  std::size_t largest_beats_smallest = 0;  // largest vs smallest tree size, per model and budget
};

std::vector<UciClaims> uci_claims(const ResultTable& table);

/// Runs cfg.id and writes CSVs (and SVG plots) into cfg.output_dir. Returns
/// the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

}  // namespace dfx
