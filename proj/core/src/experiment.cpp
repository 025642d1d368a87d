#include "dfx/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "dfx/analysis.hpp"
#include "dfx/construct.hpp"
#include "dfx/data_io.hpp"
#include "dfx/error.hpp"
#include "dfx/model_format.hpp"
#include "dfx/parallel.hpp"
#include "dfx/plot.hpp"
#include "dfx/rng.hpp"

namespace dfx {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Result tables

namespace {

const char* kResultHeader =
    "experiment,dataset,model,setting,tree_size,total_leaves,dim,train_accuracy,test_accuracy,seed";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string bool_text(bool b) { return b ? "PASS" : "FAIL"; }

class ProgressSink {
 public:
  explicit ProgressSink(const Progress& p) : progress_(p) {}
  void operator()(const std::string& message) {
    if (!progress_) return;
    std::lock_guard lock(mutex_);
    progress_(message);
  }

 private:
  const Progress& progress_;
  std::mutex mutex_;
};

}  // namespace

void write_results_csv(const ResultTable& table, std::ostream& out) {
  const bool timed = std::any_of(table.begin(), table.end(), [](const ResultRow& r) { return r.wall_time.has_value(); });
  out << kResultHeader << (timed ? ",wall_time_s\n" : "\n");
  for (const auto& r : table) {
    out << r.experiment << ',' << r.dataset << ',' << r.model << ',' << r.setting << ',' << r.tree_size << ','
        << r.total_leaves << ',' << r.dim << ',' << format_real(r.train_accuracy) << ','
        << format_real(r.test_accuracy) << ',' << r.seed;
    if (timed) out << ',' << (r.wall_time ? format_real(*r.wall_time) : "");
    out << '\n';
  }
  if (!out) throw Error(Errc::IoError, "result CSV write failed");
}

void write_results_csv(const ResultTable& table, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string());
  write_results_csv(table, out);
}

ResultTable read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::EmptyTable, "result table is empty");
  const auto header = split_csv(line);
  const bool timed = header.size() == 11 && header.back() == "wall_time_s";
  if (line.rfind(kResultHeader, 0) != 0 || !(header.size() == 10 || timed)) {
    throw ParseError(Errc::MalformedRow, "not a result table header", 1, 1);
  }
  ResultTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": wrong field count", line_no, 1);
    }
    try {
      ResultRow r;
      r.experiment = f[0];
      r.dataset = f[1];
      r.model = f[2];
      r.setting = f[3];
      r.tree_size = std::stoull(f[4]);
      r.total_leaves = std::stoull(f[5]);
      r.dim = std::stoi(f[6]);
      r.train_accuracy = std::stod(f[7]);
      r.test_accuracy = std::stod(f[8]);
      r.seed = std::stoull(f[9]);
      if (timed && !f[10].empty()) r.wall_time = std::stod(f[10]);
      table.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad number", line_no, 1);
    }
  }
  return table;
}

ResultTable read_results_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_results_csv(in);
}

std::vector<LeavesToTarget> summarize_leaves_to_target(const ResultTable& table, double target) {
  std::vector<LeavesToTarget> out;
  for (const auto& r : table) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const LeavesToTarget& s) { return s.dataset == r.dataset && s.model == r.model; });
    if (it == out.end()) {
      out.push_back({r.dataset, r.model, std::nullopt});
      it = out.end() - 1;
    }
    if (r.test_accuracy >= target && (!it->leaves || r.total_leaves < *it->leaves)) it->leaves = r.total_leaves;
  }
  return out;
}

std::optional<std::size_t> leaves_to_target(const std::vector<LeavesToTarget>& summary, const std::string& dataset,
                                            const std::string& model) {
  for (const auto& s : summary) {
    if (s.dataset == dataset && s.model == model) return s.leaves;
  }
  throw Error(Errc::InvalidArgument, "no summary entry for " + dataset + " / " + model);
}

void write_summary_csv(const std::vector<LeavesToTarget>& summary, std::ostream& out) {
  out << "dataset,model,leaves_to_target\n";
  for (const auto& s : summary) {
    out << s.dataset << ',' << s.model << ',' << (s.leaves ? std::to_string(*s.leaves) : std::string("fail")) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Simulation sweep

namespace {

std::size_t suffix_number(const std::string& model) {
  const auto dash = model.find('-');
  if (dash == std::string::npos) throw Error(Errc::InvalidArgument, "model '" + model + "' lacks a size suffix");
  std::size_t pos = 0;
  std::size_t v = 0;
  try {
    v = std::stoul(model.substr(dash + 1), &pos);
  } catch (const std::logic_error&) {
    pos = 0;
  }
  if (pos == 0 || dash + 1 + pos != model.size() || v == 0) {
    throw Error(Errc::InvalidArgument, "bad size in model '" + model + "'");
  }
  return v;
}

}  // namespace

Model train_sim_model(const std::string& model, int depth, const LabeledDataset& train, std::uint64_t seed,
                      unsigned threads) {
  TrainConfig tc;
  tc.max_depth = depth;
  tc.seed = seed;
  tc.threads = threads;
  if (model == "T") return train_tree(train, tc);
  if (model.rfind("DT-", 0) == 0) {
    tc.cascade_depth = suffix_number(model);
    tc.layer_kind = LayerKind::Tree;
    tc.augment_mode = AugmentMode::Label;
    return train_cascade(train, tc);
  }
  if (model.rfind("RF-", 0) == 0) {
    tc.n_trees = suffix_number(model);
    tc.bootstrap = true;
    tc.feature_subsample = FeatureSubsample::SqrtD;
    return train_forest(train, tc);
  }
  throw Error(Errc::InvalidArgument, "unknown model descriptor '" + model + "'");
}

ResultTable run_simulation(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  ProgressSink report(progress);
  ResultTable table;
  for (int n : cfg.sim.dims) {
    SimulationSpec spec;
    spec.n = n;
    spec.a = cfg.sim.a;
    spec.sample_count = cfg.sim.sample_count;
    spec.seed = derive_seed(cfg.seed, "sim.data", static_cast<std::uint64_t>(n));
    spec.threads = cfg.threads;
    const LabeledDataset data = generate_simulation(spec);
    const LabeledDataset train = data.train();
    const LabeledDataset test = data.test();
    const std::string dataset = "n=" + std::to_string(n);

    struct Cell {
      std::string model;
      int depth;
    };
    std::vector<Cell> cells;
    for (const auto& m : cfg.sim.models) {
      for (int d : cfg.sim.depths) cells.push_back({m, d});
    }
    std::vector<ResultRow> rows(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
      const auto& cell = cells[i];
      const auto start = std::chrono::steady_clock::now();
      const std::uint64_t seed =
          derive_seed(cfg.seed, "sim.cell." + dataset + "." + cell.model, static_cast<std::uint64_t>(cell.depth));
      const Model model = train_sim_model(cell.model, cell.depth, train, seed, 1);
      ResultRow& r = rows[i];
      r.experiment = "sim";
      r.dataset = dataset;
      r.model = cell.model;
      r.setting = "depth=" + std::to_string(cell.depth);
      r.total_leaves = total_leaves(model);
      r.dim = ensemble_dim(model);
      r.train_accuracy = accuracy(model, train);
      r.test_accuracy = accuracy(model, test);
      r.seed = seed;
      if (cfg.record_wall_time) {
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      report(dataset + " " + cell.model + " " + r.setting + " leaves=" + std::to_string(r.total_leaves) +
             " test=" + format_real(r.test_accuracy));
    });
    table.insert(table.end(), rows.begin(), rows.end());
  }
  return table;
}

// ---------------------------------------------------------------------------
// Gini verification

std::vector<GiniRow> run_gini_verification(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  std::vector<GiniRow> rows;
  for (int n : cfg.gini.dims) {
    const LatticeSpace space(n, 4);
    const Concept parity = Concept::parity();
    const bool uniform_zero =
        gini_gain_map(space, LatticeDistribution::uniform(), parity, Hyperrectangle::whole(space)).all_zero();
    for (const auto& a : cfg.gini.a_values) {
      const SplitTrace trace = gini_split_trace(space, LatticeDistribution::product(a), parity, n);
      GiniRow row;
      row.n = n;
      row.a = a.str();
      row.nodes = trace.nodes.size();
      if (!trace.nodes.empty()) {
        row.root_feature = trace.nodes.front().feature;
        row.root_cut = trace.nodes.front().cut;
      }
      row.midpoints = trace.midpoints;
      row.even_layers_repeat_parent = trace.even_layers_repeat_parent;
      row.layers_agree = trace.layers_agree;
      row.gains_positive = trace.gains_positive;
      row.pass = trace.pass();
      row.uniform_zero_gain = uniform_zero;
      if (progress) progress("gini n=" + std::to_string(n) + " a=" + row.a + " " + bool_text(row.pass));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_gini_csv(const std::vector<GiniRow>& rows, std::ostream& out) {
  out << "n,a,nodes,root_feature,root_cut,midpoints,even_layers_repeat_parent,layers_agree,gains_positive,"
         "uniform_zero_gain,result\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.a << ',' << r.nodes << ',' << r.root_feature << ',' << r.root_cut << ',' << r.midpoints
        << ',' << r.even_layers_repeat_parent << ',' << r.layers_agree << ',' << r.gains_positive << ','
        << r.uniform_zero_gain << ',' << bool_text(r.pass) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Bounds suite

namespace {

LabeledDataset lattice_dataset(const LatticeSpace& space, const std::vector<int>& labels, std::size_t copies) {
  LabeledDataset data;
  data.width = static_cast<std::size_t>(space.dim());
  std::uint64_t i = 0;
  for_each_point(space, [&](const Point& x) {
    const auto real = to_real(x);
    for (std::size_t c = 0; c < copies; ++c) data.add_row(real, labels[i]);
    ++i;
  });
  return data;
}

std::vector<int> concept_labels(const LatticeSpace& space, const Concept& target) {
  std::vector<int> labels;
  for_each_point(space, [&](const Point& x) { labels.push_back(target.label(space, x)); });
  return labels;
}

Tree random_lattice_tree(Rng& rng, const LatticeSpace& space, std::size_t leaves) {
  if (leaves <= 1) return Tree::leaf(rng.coin() ? +1 : -1);
  const std::size_t left = 1 + static_cast<std::size_t>(rng.below(leaves - 1));
  const int feature = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(space.dim())));
  const int cut = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(space.cardinality() - 1)));
  return Tree::node(feature, cut + 0.5, random_lattice_tree(rng, space, left),
                    random_lattice_tree(rng, space, leaves - left));
}

std::uint64_t count_mismatches(const Model& model, const LatticeSpace& space, const Concept& target) {
  std::uint64_t bad = 0;
  for_each_point(space, [&](const Point& x) { bad += predict(model, std::span<const Coord>(x)) != target.label(space, x); });
  return bad;
}

std::string space_name(const LatticeSpace& s) {
  return "[" + std::to_string(s.cardinality()) + "]^" + std::to_string(s.dim());
}

}  // namespace

std::vector<BoundCheck> run_bounds_suite(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  std::vector<BoundCheck> out;
  auto add = [&](BoundCheck c) {
    if (progress) progress(c.suite + " " + c.instance + " " + bool_text(c.pass));
    out.push_back(std::move(c));
  };
  const Concept parity = Concept::parity();
  const LatticeDistribution uniform = LatticeDistribution::uniform();

  // Constructive parity deep trees.
  for (int p : cfg.bounds.p_values) {
    for (int n = 1; n <= cfg.bounds.n_max; ++n) {
      const LatticeSpace space(n, p);
      const DeepTree dt = build_parity_deeptree(p, n);
      const auto bad = count_mismatches(dt, space, parity);
      const int bound = 10 * p * n;
      add({"parity_deeptree", space_name(space), "dim=" + std::to_string(dt.dim()) + " errors=" + std::to_string(bad),
           "dim<=" + std::to_string(bound), bad == 0 && dt.dim() <= bound});
    }
  }

  // Tree to deep tree compilation on [4]^3.
  {
    const LatticeSpace space(3, 4);
    Rng rng(derive_seed(cfg.seed, "bounds.compile"));
    std::size_t agree = 0;
    std::size_t formula = 0;
    std::size_t within = 0;
    const std::size_t total = cfg.bounds.random_trees;
    for (std::size_t t = 0; t < total; ++t) {
      std::vector<int> labels(static_cast<std::size_t>(space.size()));
      for (auto& y : labels) y = rng.coin() ? +1 : -1;
      TrainConfig tc;
      tc.max_leaves = 2 + static_cast<std::size_t>(rng.below(23));
      const Tree source = train_tree(lattice_dataset(space, labels, 1), tc);
      const CompileResult compiled = compile_to_deeptree(source, space);
      bool same = true;
      for_each_point(space, [&](const Point& x) {
        same = same && compiled.model.eval(std::span<const Coord>(x)) == source.eval(std::span<const Coord>(x));
      });
      agree += same;
      formula += compiled.report.compiled_dim == compiled.report.formula_dim;
      within += compiled.report.within_bound;
    }
    add({"compile_agreement", "[4]^3 x" + std::to_string(total), std::to_string(agree), std::to_string(total),
         agree == total});
    add({"compile_formula", "[4]^3 x" + std::to_string(total), std::to_string(formula), std::to_string(total),
         formula == total});
    add({"compile_bound", "[4]^3 x" + std::to_string(total), std::to_string(within), std::to_string(total),
         within == total});
  }

  // Zero-error forests need p^n leaves in total.
  for (int p : cfg.bounds.p_values) {
    const LatticeSpace space(2, p);
    const auto labels = concept_labels(space, parity);
    TrainConfig full;
    const Tree exact = train_tree(lattice_dataset(space, labels, 1), full);
    std::vector<std::pair<std::string, Forest>> forests;
    forests.emplace_back("single", Forest::unrestricted({exact}));
    forests.emplace_back("triple", Forest::unrestricted({exact, exact, exact}));
    forests.emplace_back("two+leaf", Forest::unrestricted({exact, Tree::leaf(+1), exact}));
    TrainConfig rf;
    rf.n_trees = 9;
    rf.seed = derive_seed(cfg.seed, "bounds.rf", static_cast<std::uint64_t>(p));
    forests.emplace_back("trained RF-9", train_forest(lattice_dataset(space, labels, 10), rf));
    for (const auto& [name, forest] : forests) {
      BoundCheck c{"forest_leafbound", space_name(space) + " " + name, "", "leaves>=" + std::to_string(space.size()),
                   false};
      try {
        const LeafBoundCheck check = forest_zero_error_leafbound(forest, parity, space);
        c.measured = "leaves=" + std::to_string(check.total_leaves);
        c.pass = check.holds;
      } catch (const Error& e) {
        if (e.code() != Errc::PreconditionViolated) throw;
        c.measured = "risk>0";
      }
      add(c);
    }
  }

  // Label-connected partitions of parity.
  for (int p : cfg.bounds.p_values) {
    for (int n = 1; n <= std::min(6, cfg.bounds.n_max); ++n) {
      const LatticeSpace space(n, p);
      const LabelPartition part = label_partition(space, parity, 1);
      const PartitionCheck structure = verify_partition(part, space, parity, 1);
      const auto pos = part.count_with_label(+1);
      const auto neg = part.count_with_label(-1);
      const std::size_t gap = pos > neg ? pos - neg : neg - pos;
      add({"partition", space_name(space),
           "classes=" + std::to_string(part.size()) + " gap=" + std::to_string(gap) +
               (structure.ok() ? " structure=ok" : " structure=bad"),
           "classes=" + std::to_string(space.size()) + " gap<=1",
           part.size() == space.size() && gap <= 1 && structure.ok()});
    }
  }

  // Error sets of random trees against parity.
  {
    Rng rng(derive_seed(cfg.seed, "bounds.error_set"));
    std::size_t holds = 0;
    const std::size_t total = cfg.bounds.error_set_trees;
    for (std::size_t t = 0; t < total; ++t) {
      const int p = 2 + static_cast<int>(rng.below(3));
      const int n = 1 + static_cast<int>(rng.below(3));
      const LatticeSpace space(n, p);
      const std::size_t leaves = 1 + static_cast<std::size_t>(rng.below(space.size() + 2));
      const Tree tree = random_lattice_tree(rng, space, leaves);
      const RiskReport r = risk_report(tree, parity, uniform, space);
      const auto L = static_cast<std::int64_t>(tree.leaf_count());
      const auto size = static_cast<std::int64_t>(space.size());
      const bool ok = 2 * static_cast<std::int64_t>(r.error_set_size) >= size - L &&
                      2 * static_cast<std::int64_t>(r.proper_set_size) <= size + L;
      holds += ok;
    }
    add({"error_set", "random trees x" + std::to_string(total), std::to_string(holds), std::to_string(total),
         holds == total});
  }

  // Exhaustive tree complexity on tiny lattices.
  for (auto [n, p] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}}) {
    const LatticeSpace space(n, p);
    OracleOptions options;
    options.max_leaves = static_cast<std::size_t>(space.size());
    const auto profile = oracle_error_profile(space, parity, uniform, options);
    bool holds = true;
    for (std::size_t k = 1; k <= profile.size(); ++k) {
      holds = holds && 2 * profile[k - 1] >= BigInt(space.size()) - BigInt(k);
    }
    const ComplexityResult exact = tree_complexity_oracle(space, parity, uniform, 0.0, options);
    const ComplexityResult quarter = tree_complexity_oracle(space, parity, uniform, 0.25, options);
    const std::uint64_t half = (space.size() + 1) / 2;
    add({"oracle_zero_error", space_name(space), "leaves=" + std::to_string(exact.minimal_leaves),
         "leaves=" + std::to_string(space.size()), exact.found && exact.minimal_leaves == space.size()});
    add({"oracle_quarter_error", space_name(space), "leaves=" + std::to_string(quarter.minimal_leaves),
         "leaves>=" + std::to_string(half), quarter.found && quarter.minimal_leaves >= half});
    add({"oracle_error_profile", space_name(space), holds ? "2|E|>=p^n-L for all L" : "violated",
         "2|E|>=p^n-L", holds});
  }
  return out;
}

void write_bounds_csv(const std::vector<BoundCheck>& rows, std::ostream& out) {
  out << "suite,instance,measured,bound,result\n";
  for (const auto& r : rows) {
    out << r.suite << ',' << r.instance << ',' << r.measured << ',' << r.bound << ',' << bool_text(r.pass) << '\n';
  }
}

// ---------------------------------------------------------------------------
// UCI sweep

ResultTable run_uci_on(const std::string& name, const LabeledDataset& data, const ExperimentConfig& cfg,
                       const Progress& progress) {
  if (!data.has_split()) throw Error(Errc::InvalidArgument, name + " has no predefined train/test split");
  const LabeledDataset train = data.train();
  const LabeledDataset test = data.test();
  ResultTable table;
  for (std::size_t size : cfg.uci.tree_sizes) {
    for (std::size_t i = 0; i < cfg.uci.rf_trees.size(); ++i) {
      const std::string setting = "budget=" + std::to_string(cfg.uci.rf_trees[i]);
      for (int kind = 0; kind < 2; ++kind) {
        const auto start = std::chrono::steady_clock::now();
        TrainConfig tc;
        tc.max_leaves = size;
        tc.threads = cfg.threads;
        ResultRow r;
        r.experiment = "uci";
        r.dataset = name;
        r.setting = setting;
        r.tree_size = size;
        std::optional<Model> model;
        if (kind == 0) {
          r.model = "RF";
          tc.n_trees = cfg.uci.rf_trees[i];
          tc.seed = derive_seed(cfg.seed, "uci." + name + ".rf." + std::to_string(size), i);
          model = train_forest(train, tc);
        } else {
          r.model = "DF-" + std::to_string(cfg.uci.df_layers);
          tc.n_trees = cfg.uci.df_trees[i];
          tc.cascade_depth = cfg.uci.df_layers;
          tc.layer_kind = LayerKind::Forest;
          tc.augment_mode = AugmentMode::ClassVector;
          tc.seed = derive_seed(cfg.seed, "uci." + name + ".df." + std::to_string(size), i);
          model = train_cascade(train, tc);
        }
        r.seed = tc.seed;
        r.total_leaves = total_leaves(*model);
        r.dim = ensemble_dim(*model);
        r.train_accuracy = accuracy(*model, train);
        r.test_accuracy = accuracy(*model, test);
        if (cfg.record_wall_time) {
          r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        if (progress) {
          progress(name + " " + r.model + " size=" + std::to_string(size) + " " + setting +
                   " test=" + format_real(r.test_accuracy));
        }
        table.push_back(std::move(r));
      }
    }
  }
  return table;
}

ResultTable run_uci(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  const auto manifests = read_manifests(cfg.uci.manifest);
  const fs::path cache = cfg.uci.cache_dir.empty() ? default_cache_dir() : fs::path(cfg.uci.cache_dir);
  FetchOptions options;
  options.offline = cfg.uci.offline;
  ResultTable table;
  for (const auto& name : cfg.uci.datasets) {
    const LabeledDataset data = fetch_dataset(find_manifest(manifests, name), cache, options);
    const ResultTable part = run_uci_on(name, data, cfg, progress);
    table.insert(table.end(), part.begin(), part.end());
  }
  return table;
}

std::vector<UciClaims> uci_claims(const ResultTable& table) {
  std::vector<UciClaims> out;
  auto claims_for = [&](const std::string& dataset) -> UciClaims& {
    for (auto& c : out) {
      if (c.dataset == dataset) return c;
    }
    out.push_back({dataset});
    return out.back();
  };
  // (dataset, model, setting) -> tree size -> accuracy
  std::map<std::tuple<std::string, std::string, std::string>, std::map<std::size_t, double>> by_size;
  for (const auto& r : table) {
    if (r.experiment != "uci") continue;
    claims_for(r.dataset);
    by_size[{r.dataset, r.model, r.setting}][r.tree_size] = r.test_accuracy;
  }
  for (const auto& r : table) {
    if (r.experiment != "uci" || r.model != "RF") continue;
    for (const auto& other : table) {
      if (other.experiment == "uci" && other.dataset == r.dataset && other.model.rfind("DF-", 0) == 0 &&
          other.setting == r.setting && other.tree_size == r.tree_size) {
        UciClaims& c = claims_for(r.dataset);
        ++c.cells;
        c.df_not_worse += other.test_accuracy >= r.test_accuracy;
      }
    }
  }
  for (const auto& [key, sizes] : by_size) {
    if (sizes.size() < 2) continue;
    UciClaims& c = claims_for(std::get<0>(key));
    ++c.size_pairs;
    c.largest_beats_smallest += sizes.rbegin()->second > sizes.begin()->second;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<fs::path> run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto write_text = [&](const std::string& file, const std::string& text) {
    const fs::path path = dir / file;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    written.push_back(path);
  };
  auto plot_datasets = [&](const ResultTable& table, const std::string& prefix) {
    std::vector<std::string> datasets;
    for (const auto& r : table) {
      if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    }
    for (const auto& d : datasets) {
      std::string stem = d;
      std::replace(stem.begin(), stem.end(), '=', '_');
      write_text(prefix + stem + ".svg", render_accuracy_plot(table, d));
    }
  };

  switch (cfg.id) {
    case ExperimentId::Sim: {
      const ResultTable table = run_simulation(cfg, progress);
      std::ostringstream csv;
      write_results_csv(table, csv);
      write_text("sim_results.csv", csv.str());
      std::ostringstream summary;
      write_summary_csv(summarize_leaves_to_target(table, cfg.sim.target_accuracy), summary);
      write_text("sim_summary.csv", summary.str());
      plot_datasets(table, "sim_");
      break;
    }
    case ExperimentId::Gini: {
      const auto rows = run_gini_verification(cfg, progress);
      std::ostringstream csv;
      write_gini_csv(rows, csv);
      write_text("gini.csv", csv.str());
      const LatticeSpace space(2, 4);
      write_text("gini_uniform_n2.svg",
                 render_gain_bars(gini_gain_map(space, LatticeDistribution::uniform(), Concept::parity(),
                                                Hyperrectangle::whole(space)),
                                  "uniform, n=2"));
      const Rational a = cfg.gini.a_values.front();
      write_text("gini_product_n2.svg",
                 render_gain_bars(gini_gain_map(space, LatticeDistribution::product(a), Concept::parity(),
                                                Hyperrectangle::whole(space)),
                                  "product a=" + a.str() + ", n=2"));
      break;
    }
    case ExperimentId::Bounds: {
      const auto rows = run_bounds_suite(cfg, progress);
      std::ostringstream csv;
      write_bounds_csv(rows, csv);
      write_text("bounds.csv", csv.str());
      break;
    }
    case ExperimentId::Uci: {
      const ResultTable table = run_uci(cfg, progress);
      std::ostringstream csv;
      write_results_csv(table, csv);
      write_text("uci_results.csv", csv.str());
      plot_datasets(table, "uci_");
      break;
    }
  }
  return written;
}

}  // namespace dfx
