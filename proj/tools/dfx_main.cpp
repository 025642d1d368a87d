// dfx: command-line front end for building, checking and training tree
// ensembles on lattice parity problems.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dfx/analysis.hpp"
#include "dfx/config.hpp"
#include "dfx/construct.hpp"
#include "dfx/data_io.hpp"
#include "dfx/error.hpp"
#include "dfx/experiment.hpp"
#include "dfx/model_format.hpp"
#include "dfx/plot.hpp"

namespace {

using namespace dfx;

struct Common {
  std::uint64_t seed = 0;
  bool offline = false;
  std::string scale = "desk";
};

LatticeDistribution make_dist(const std::string& name, const std::string& a) {
  if (name == "uniform") return LatticeDistribution::uniform();
  if (name == "product") return LatticeDistribution::product(Rational::parse(a));
  throw Error(Errc::InvalidArgument, "distribution must be uniform or product");
}

Concept make_concept(const std::string& name) {
  if (name == "parity") return Concept::parity();
  if (name == "constant+1" || name == "constant") return Concept::constant(+1);
  if (name == "constant-1") return Concept::constant(-1);
  throw Error(Errc::InvalidArgument, "concept must be parity, constant+1 or constant-1");
}

Hyperrectangle parse_region(const std::string& text, const LatticeSpace& space) {
  if (text.empty()) return Hyperrectangle::whole(space);
  Hyperrectangle box;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw Error(Errc::InvalidArgument, "region items look like lo-hi");
    box.bounds.push_back({std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))});
  }
  return box;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree, forest and deep-tree toolkit for lattice parity experiments"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Master seed");
  app.add_flag("--offline", common.offline, "Never touch the network");
  app.add_option("--scale", common.scale, "Problem scale")->check(CLI::IsMember({"desk", "paper"}));

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate noisy parity data as CSV");
  SimulationSpec spec;
  std::string gen_out = "-";
  std::string gen_a = "3";
  gen->add_option("--n", spec.n, "Input dimension")->required();
  gen->add_option("--count", spec.sample_count, "Number of samples");
  gen->add_option("--a", gen_a, "Product distribution parameter");
  gen->add_option("--split", spec.split_fraction, "Training fraction");
  gen->add_option("--threads", spec.threads, "Worker threads");
  gen->add_option("--out", gen_out, "Output CSV (- for stdout)");

  // fetch-uci
  auto* fetch = app.add_subcommand("fetch-uci", "Download and verify a UCI dataset");
  std::string fetch_name;
  std::string fetch_cache;
  std::string fetch_manifest = "data/uci_manifest.ini";
  std::string fetch_out;
  fetch->add_option("--name", fetch_name, "pendigits, satimage or segment")->required();
  fetch->add_option("--cache", fetch_cache, "Cache directory (default $DFX_CACHE_DIR or ./cache)");
  fetch->add_option("--manifest", fetch_manifest, "Manifest INI");
  fetch->add_option("--out", fetch_out, "Also write the dataset as CSV");

  // build-parity
  auto* build = app.add_subcommand("build-parity", "Construct the exact parity deep tree");
  int build_p = 4;
  int build_n = 2;
  std::string build_out;
  build->add_option("--p", build_p, "Lattice cardinality")->required();
  build->add_option("--n", build_n, "Input dimension")->required();
  build->add_option("--out", build_out, "Write the model here instead of stdout");

  // compile-tree
  auto* compile = app.add_subcommand("compile-tree", "Rewrite a lattice tree as a restricted deep tree");
  std::string compile_in;
  std::string compile_out;
  int compile_p = 4;
  int compile_n = 0;
  bool compile_report = false;
  compile->add_option("--in,--model", compile_in, "Source tree (s-expression file)")->required();
  compile->add_option("--p", compile_p, "Lattice cardinality")->required();
  compile->add_option("--n", compile_n, "Input dimension (default: largest feature used)");
  compile->add_option("--out", compile_out, "Output model file");
  compile->add_flag("--report", compile_report, "Print the size report as CSV");

  // train
  auto* train = app.add_subcommand("train", "Train a model from CSV data");
  std::string train_kind = "tree";
  std::string train_cfg;
  std::string train_data;
  std::string train_out = "-";
  train->add_option("--model", train_kind, "Model kind")
      ->check(CLI::IsMember({"tree", "forest", "cascade-tree", "cascade-forest"}));
  train->add_option("--config", train_cfg, "INI file with a [train] section");
  train->add_option("--data", train_data, "Training CSV (its train split if present)")->required();
  train->add_option("--out", train_out, "Output model file");

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy and total leaves of a model on CSV data");
  std::string eval_model;
  std::string eval_data;
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--data", eval_data, "CSV (its test split if present)")->required();

  // partition
  auto* partition = app.add_subcommand("partition", "Label-connected partition of a lattice");
  int part_p = 2, part_n = 2, part_r = 1;
  std::string part_concept = "parity";
  bool part_classes = false;
  partition->add_option("--p", part_p)->required();
  partition->add_option("--n", part_n)->required();
  partition->add_option("--r", part_r, "L1 step radius");
  partition->add_option("--concept", part_concept);
  partition->add_flag("--classes", part_classes, "List every class");

  // risk
  auto* risk = app.add_subcommand("risk", "Exact error and proper sets of a model");
  std::string risk_model;
  int risk_p = 2, risk_n = 2;
  std::string risk_dist = "uniform", risk_a = "3", risk_concept = "parity";
  risk->add_option("--model", risk_model)->required();
  risk->add_option("--p", risk_p)->required();
  risk->add_option("--n", risk_n)->required();
  risk->add_option("--dist", risk_dist);
  risk->add_option("--a", risk_a);
  risk->add_option("--concept", risk_concept);

  // complexity
  auto* complexity = app.add_subcommand("complexity", "Smallest tree reaching a risk target, by exhaustive search");
  int cx_p = 2, cx_n = 2;
  double cx_eps = 0.0;
  std::string cx_dist = "uniform", cx_a = "3", cx_concept = "parity";
  OracleOptions cx_options;
  complexity->add_option("--p", cx_p)->required();
  complexity->add_option("--n", cx_n)->required();
  complexity->add_option("--epsilon", cx_eps);
  complexity->add_option("--dist", cx_dist);
  complexity->add_option("--a", cx_a);
  complexity->add_option("--concept", cx_concept);
  complexity->add_option("--max-leaves", cx_options.max_leaves);
  complexity->add_option("--point-cap", cx_options.point_cap);
  complexity->add_option("--node-budget", cx_options.node_budget);

  // leafbound
  auto* leafbound = app.add_subcommand("leafbound", "Check total leaves of a zero-error parity forest");
  std::string lb_model;
  int lb_p = 2, lb_n = 2;
  leafbound->add_option("--model", lb_model, "Forest file")->required();
  leafbound->add_option("--p", lb_p)->required();
  leafbound->add_option("--n", lb_n)->required();

  // gini-map
  auto* gini = app.add_subcommand("gini-map", "Exact Gini gains of every integer cut");
  int gini_n = 2;
  std::string gini_dist = "product", gini_a = "3", gini_region, gini_svg;
  bool gini_trace = false;
  gini->add_option("--n", gini_n)->required();
  gini->add_option("--dist", gini_dist);
  gini->add_option("--a", gini_a);
  gini->add_option("--region", gini_region, "Box as lo-hi,lo-hi,...");
  gini->add_option("--svg", gini_svg, "Also render a bar chart");
  gini->add_flag("--trace", gini_trace, "Print the greedy split trace instead");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run an experiment sweep");
  std::string exp_id;
  std::string exp_cfg;
  std::string exp_out;
  unsigned exp_threads = 0;
  bool exp_quiet = false;
  experiment->add_option("id", exp_id, "sim, gini, bounds or uci")
      ->required()
      ->check(CLI::IsMember({"sim", "gini", "bounds", "uci"}));
  experiment->add_option("--config", exp_cfg, "Experiment INI");
  experiment->add_option("--out", exp_out, "Output directory");
  experiment->add_option("--threads", exp_threads, "Worker threads");
  experiment->add_flag("--quiet", exp_quiet, "No progress output");

  // plot
  auto* plot = app.add_subcommand("plot", "Render an accuracy plot from a result CSV");
  std::string plot_in, plot_dataset, plot_out = "-";
  plot->add_option("--results", plot_in)->required();
  plot->add_option("--dataset", plot_dataset)->required();
  plot->add_option("--out", plot_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      spec.a = Rational::parse(gen_a);
      spec.seed = common.seed;
      if (common.scale == "paper" && gen->count("--count") == 0) spec.sample_count = 1'000'000;
      const LabeledDataset data = generate_simulation(spec);
      if (gen_out == "-") {
        write_csv(data, std::cout);
      } else {
        write_csv(data, std::filesystem::path(gen_out));
      }
    } else if (*fetch) {
      const auto manifest = find_manifest(read_manifests(fetch_manifest), fetch_name);
      FetchOptions options;
      options.offline = common.offline;
      const auto cache = fetch_cache.empty() ? default_cache_dir() : std::filesystem::path(fetch_cache);
      const LabeledDataset data = fetch_dataset(manifest, cache, options);
      std::cout << "name,rows,train,test,features,classes\n"
                << manifest.name << ',' << data.size() << ',' << data.train_index.size() << ','
                << data.test_index.size() << ',' << data.width << ',' << data.classes().size() << '\n';
      if (!fetch_out.empty()) write_csv(data, std::filesystem::path(fetch_out));
    } else if (*build) {
      const DeepTree dt = build_parity_deeptree(build_p, build_n);
      if (build_out.empty()) {
        std::cout << print_model(dt);
      } else {
        write_model_file(build_out, dt);
        std::cout << "p,n,layers,dim,bound\n"
                  << build_p << ',' << build_n << ',' << dt.depth() << ',' << dt.dim() << ',' << 10 * build_p * build_n
                  << '\n';
      }
    } else if (*compile) {
      const Model source = read_model_file(compile_in);
      const auto* tree = std::get_if<Tree>(&source);
      if (!tree) throw Error(Errc::InvalidArgument, "compile-tree needs a single tree");
      const int n = compile_n > 0 ? compile_n : std::max(1, tree->max_feature());
      const CompileResult result = compile_to_deeptree(*tree, LatticeSpace(n, compile_p));
      if (!compile_out.empty()) {
        write_model_file(compile_out, result.model);
      } else if (!compile_report) {
        std::cout << print_model(result.model);
      }
      if (compile_report) {
        const auto& r = result.report;
        std::cout << "positive_leaves,negative_leaves,chosen_label,source_dim,compiled_dim,formula_dim,bound_dim,"
                     "within_bound\n"
                  << r.positive_leaves << ',' << r.negative_leaves << ',' << format_label(r.chosen_label) << ','
                  << r.source_dim << ',' << r.compiled_dim << ',' << r.formula_dim << ',' << r.bound_dim << ','
                  << csv_bool(r.within_bound) << '\n';
      }
    } else if (*train) {
      TrainConfig cfg = train_cfg.empty() ? TrainConfig{} : read_train_config(train_cfg);
      if (train->count("--config") == 0 || app.count("--seed")) cfg.seed = common.seed;
      LabeledDataset data = read_csv(std::filesystem::path(train_data));
      if (data.has_split()) data = data.train();
      Model model = Tree::leaf(0);
      if (train_kind == "tree") {
        model = train_tree(data, cfg);
      } else if (train_kind == "forest") {
        model = train_forest(data, cfg);
      } else {
        cfg.layer_kind = train_kind == "cascade-tree" ? LayerKind::Tree : LayerKind::Forest;
        model = train_cascade(data, cfg);
      }
      if (train_out == "-") {
        std::cout << print_model(model);
      } else {
        write_model_file(train_out, model);
      }
    } else if (*eval) {
      const Model model = read_model_file(eval_model);
      LabeledDataset data = read_csv(std::filesystem::path(eval_data));
      if (data.has_split()) data = data.test();
      std::cout << "accuracy,total_leaves,dim\n"
                << format_real(accuracy(model, data)) << ',' << total_leaves(model) << ',' << ensemble_dim(model)
                << '\n';
    } else if (*partition) {
      const LatticeSpace space(part_n, part_p);
      const Concept target = make_concept(part_concept);
      const LabelPartition part = label_partition(space, target, part_r);
      const PartitionCheck check = verify_partition(part, space, target, part_r);
      if (part_classes) {
        std::cout << "class,label,size,first_point\n";
        for (std::size_t c = 0; c < part.size(); ++c) {
          const Point x = space.point_at(part.classes[c].front());
          std::string pt;
          for (std::size_t i = 0; i < x.size(); ++i) pt += (i ? " " : "") + std::to_string(x[i]);
          std::cout << c << ',' << format_label(part.labels[c]) << ',' << part.classes[c].size() << ',' << pt << '\n';
        }
      } else {
        std::cout << "p,n,r,classes,positive_classes,negative_classes,structure_ok\n"
                  << part_p << ',' << part_n << ',' << part_r << ',' << part.size() << ','
                  << part.count_with_label(+1) << ',' << part.count_with_label(-1) << ',' << csv_bool(check.ok())
                  << '\n';
      }
    } else if (*risk) {
      const Model model = read_model_file(risk_model);
      const LatticeSpace space(risk_n, risk_p);
      const RiskReport r = risk_report(model, make_concept(risk_concept), make_dist(risk_dist, risk_a), space);
      std::cout << "error_set,proper_set,risk,error_weight,total_weight,leaves\n"
                << r.error_set_size << ',' << r.proper_set_size << ',' << format_real(r.exact_risk) << ','
                << r.error_weight << ',' << r.total_weight << ',' << r.leaf_count << '\n';
    } else if (*complexity) {
      const LatticeSpace space(cx_n, cx_p);
      const ComplexityResult r =
          tree_complexity_oracle(space, make_concept(cx_concept), make_dist(cx_dist, cx_a), cx_eps, cx_options);
      std::cout << "family,concept,distribution,epsilon,found,minimal_leaves,minimal_dim,witness_risk,exhaustive,"
                   "splits,witness\n"
                << r.family << ',' << r.target << ',' << r.distribution << ',' << format_real(r.epsilon) << ','
                << csv_bool(r.found) << ',' << r.minimal_leaves << ',' << r.minimal_dim << ','
                << format_real(r.witness_risk) << ',' << csv_bool(r.search_exhaustive) << ',' << r.splits_evaluated
                << ',' << (r.witness ? print_tree(*r.witness) : "") << '\n';
    } else if (*leafbound) {
      const Model model = read_model_file(lb_model);
      Forest forest = Forest::unrestricted({Tree::leaf(1)});
      if (const auto* f = std::get_if<Forest>(&model)) {
        forest = *f;
      } else if (const auto* t = std::get_if<Tree>(&model)) {
        forest = Forest::unrestricted({*t});
      } else {
        throw Error(Errc::InvalidArgument, "leafbound needs a forest or a tree");
      }
      const LeafBoundCheck c = forest_zero_error_leafbound(forest, Concept::parity(), LatticeSpace(lb_n, lb_p));
      std::cout << "total_leaves,bound,holds\n" << c.total_leaves << ',' << c.bound << ',' << csv_bool(c.holds) << '\n';
    } else if (*gini) {
      const LatticeSpace space(gini_n, 4);
      const LatticeDistribution dist = make_dist(gini_dist, gini_a);
      if (gini_trace) {
        const SplitTrace trace = gini_split_trace(space, dist, Concept::parity(), gini_n);
        std::cout << "layer,path,feature,cut,gain,at_midpoint,same_feature_as_parent\n";
        for (const auto& node : trace.nodes) {
          std::cout << node.layer << ',' << (node.path.empty() ? "root" : node.path) << ',' << node.feature << ','
                    << node.cut << ',' << format_real(node.gain) << ',' << csv_bool(node.at_midpoint) << ','
                    << csv_bool(node.same_feature_as_parent) << '\n';
        }
        std::cout << "# pattern," << (trace.pass() ? "PASS" : "FAIL") << '\n';
      } else {
        const GainMap map = gini_gain_map(space, dist, Concept::parity(), parse_region(gini_region, space));
        std::cout << "feature,cut,gain,gain_exact\n";
        for (const auto& e : map.entries) {
          std::cout << e.feature << ',' << e.cut << ',' << format_real(e.value()) << ',' << e.gain.str() << '\n';
        }
        if (!gini_svg.empty()) write_out(gini_svg, render_gain_bars(map, gini_dist + ", n=" + std::to_string(gini_n)));
      }
    } else if (*experiment) {
      ExperimentConfig cfg = exp_cfg.empty() ? ExperimentConfig{} : read_experiment_config(exp_cfg);
      cfg.id = parse_experiment_id(exp_id);
      if (app.count("--seed")) cfg.seed = common.seed;
      if (!exp_out.empty()) cfg.output_dir = exp_out;
      if (exp_threads > 0) cfg.threads = exp_threads;
      if (common.offline) cfg.uci.offline = true;
      apply_scale(cfg, common.scale);
      Progress progress;
      if (!exp_quiet) progress = [](const std::string& m) { std::cerr << m << '\n'; };
      for (const auto& path : run_experiment(cfg, progress)) std::cout << path.string() << '\n';
    } else if (*plot) {
      write_out(plot_out, render_accuracy_plot(read_results_csv(std::filesystem::path(plot_in)), plot_dataset));
    }
  } catch (const ParseError& e) {
    std::cerr << "dfx: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "dfx: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "dfx: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
