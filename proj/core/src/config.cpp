#include "dfx/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dfx/error.hpp"

namespace dfx {

namespace pt = boost::property_tree;

ExperimentId parse_experiment_id(const std::string& s) {
  if (s == "sim") return ExperimentId::Sim;
  if (s == "gini") return ExperimentId::Gini;
  if (s == "bounds") return ExperimentId::Bounds;
  if (s == "uci") return ExperimentId::Uci;
  throw Error(Errc::InvalidArgument, "unknown experiment id '" + s + "'");
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::Sim: return "sim";
    case ExperimentId::Gini: return "gini";
    case ExperimentId::Bounds: return "bounds";
    case ExperimentId::Uci: return "uci";
  }
  return "?";
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error(Errc::InvalidArgument, "empty item in list '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
T to_number(const std::string& s) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (!in || !in.eof()) throw Error(Errc::InvalidArgument, "not a number: '" + s + "'");
  return v;
}

template <class T>
std::vector<T> number_list(const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(to_number<T>(item));
  return out;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(Errc::InvalidArgument, "not a boolean: '" + s + "'");
}

void check_keys(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.count(key)) throw Error(Errc::InvalidArgument, "unknown key '" + key + "' in [" + name + "]");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto nonempty = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidArgument, std::string("grid '") + what + "' is empty");
  };
  nonempty(!sim.dims.empty(), "sim.dims");
  nonempty(!sim.depths.empty(), "sim.depths");
  nonempty(!sim.models.empty(), "sim.models");
  nonempty(!gini.dims.empty(), "gini.dims");
  nonempty(!gini.a_values.empty(), "gini.a");
  nonempty(!bounds.p_values.empty(), "bounds.p");
  nonempty(!uci.datasets.empty(), "uci.datasets");
  nonempty(!uci.rf_trees.empty(), "uci.rf_trees");
  nonempty(!uci.df_trees.empty(), "uci.df_trees");
  nonempty(!uci.tree_sizes.empty(), "uci.tree_sizes");
  if (uci.rf_trees.size() != uci.df_trees.size()) {
    throw Error(Errc::InvalidArgument, "uci.rf_trees and uci.df_trees must pair up");
  }
  if (uci.df_layers < 1) throw Error(Errc::InvalidArgument, "uci.df_layers must be >= 1");
  if (sim.sample_count < 2) throw Error(Errc::InvalidArgument, "sim.sample_count must be >= 2");
  for (int n : sim.dims) {
    if (n < 1 || n > 64) throw Error(Errc::InvalidArgument, "sim.dims entries must lie in [1, 64]");
  }
  for (int d : sim.depths) {
    if (d < 1) throw Error(Errc::InvalidArgument, "sim.depths entries must be >= 1");
  }
  for (const auto& m : sim.models) {
    const bool ok = m == "T" || m.rfind("DT-", 0) == 0 || m.rfind("RF-", 0) == 0;
    if (!ok) throw Error(Errc::InvalidArgument, "unknown model descriptor '" + m + "'");
  }
  if (threads < 1) throw Error(Errc::InvalidArgument, "threads must be >= 1");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(Errc::SyntaxError, e.message(), e.line(), 1);
  }
  ExperimentConfig cfg;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw Error(Errc::InvalidArgument, "key '" + name + "' outside a section");
    }
    auto get = [&section](const char* key) { return section.get_optional<std::string>(key); };
    if (name == "experiment") {
      check_keys(section, name, {"id", "seed", "output_dir", "threads", "wall_time"});
      if (auto v = get("id")) cfg.id = parse_experiment_id(*v);
      if (auto v = get("seed")) cfg.seed = to_number<std::uint64_t>(*v);
      if (auto v = get("output_dir")) cfg.output_dir = *v;
      if (auto v = get("threads")) cfg.threads = to_number<unsigned>(*v);
      if (auto v = get("wall_time")) cfg.record_wall_time = to_bool(*v);
    } else if (name == "sim") {
      check_keys(section, name, {"dims", "sample_count", "a", "depths", "models", "target_accuracy"});
      if (auto v = get("dims")) cfg.sim.dims = number_list<int>(*v);
      if (auto v = get("sample_count")) cfg.sim.sample_count = to_number<std::uint64_t>(*v);
      if (auto v = get("a")) cfg.sim.a = Rational::parse(*v);
      if (auto v = get("depths")) cfg.sim.depths = number_list<int>(*v);
      if (auto v = get("models")) cfg.sim.models = split_list(*v);
      if (auto v = get("target_accuracy")) cfg.sim.target_accuracy = to_number<double>(*v);
    } else if (name == "gini") {
      check_keys(section, name, {"dims", "a"});
      if (auto v = get("dims")) cfg.gini.dims = number_list<int>(*v);
      if (auto v = get("a")) {
        cfg.gini.a_values.clear();
        for (const auto& item : split_list(*v)) cfg.gini.a_values.push_back(Rational::parse(item));
      }
    } else if (name == "bounds") {
      check_keys(section, name, {"p", "n_max", "random_trees", "error_set_trees"});
      if (auto v = get("p")) cfg.bounds.p_values = number_list<int>(*v);
      if (auto v = get("n_max")) cfg.bounds.n_max = to_number<int>(*v);
      if (auto v = get("random_trees")) cfg.bounds.random_trees = to_number<std::size_t>(*v);
      if (auto v = get("error_set_trees")) cfg.bounds.error_set_trees = to_number<std::size_t>(*v);
    } else if (name == "uci") {
      check_keys(section, name,
                 {"datasets", "rf_trees", "df_trees", "df_layers", "tree_sizes", "manifest", "cache_dir", "offline"});
      if (auto v = get("datasets")) cfg.uci.datasets = split_list(*v);
      if (auto v = get("rf_trees")) cfg.uci.rf_trees = number_list<std::size_t>(*v);
      if (auto v = get("df_trees")) cfg.uci.df_trees = number_list<std::size_t>(*v);
      if (auto v = get("df_layers")) cfg.uci.df_layers = to_number<std::size_t>(*v);
      if (auto v = get("tree_sizes")) cfg.uci.tree_sizes = number_list<std::size_t>(*v);
      if (auto v = get("manifest")) cfg.uci.manifest = *v;
      if (auto v = get("cache_dir")) cfg.uci.cache_dir = *v;
      if (auto v = get("offline")) cfg.uci.offline = to_bool(*v);
    } else {
      throw Error(Errc::InvalidArgument, "unknown section [" + name + "]");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

TrainConfig parse_train_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(Errc::SyntaxError, e.message(), e.line(), 1);
  }
  TrainConfig cfg;
  for (const auto& [name, section] : tree) {
    if (name != "train") throw Error(Errc::InvalidArgument, "unknown section [" + name + "]");
    check_keys(section, name,
               {"max_depth", "max_leaves", "min_samples_split", "seed", "n_trees", "feature_subsample", "bootstrap",
                "cascade_depth", "augment_mode", "threads"});
    auto get = [&section](const char* key) { return section.get_optional<std::string>(key); };
    if (auto v = get("max_depth")) cfg.max_depth = to_number<int>(*v);
    if (auto v = get("max_leaves")) cfg.max_leaves = to_number<std::size_t>(*v);
    if (auto v = get("min_samples_split")) cfg.min_samples_split = to_number<std::size_t>(*v);
    if (auto v = get("seed")) cfg.seed = to_number<std::uint64_t>(*v);
    if (auto v = get("n_trees")) cfg.n_trees = to_number<std::size_t>(*v);
    if (auto v = get("feature_subsample")) {
      if (*v == "all") {
        cfg.feature_subsample = FeatureSubsample::All;
      } else if (*v == "sqrt") {
        cfg.feature_subsample = FeatureSubsample::SqrtD;
      } else {
        throw Error(Errc::InvalidArgument, "feature_subsample must be all or sqrt");
      }
    }
    if (auto v = get("bootstrap")) cfg.bootstrap = to_bool(*v);
    if (auto v = get("cascade_depth")) cfg.cascade_depth = to_number<std::size_t>(*v);
    if (auto v = get("augment_mode")) {
      if (*v == "label") {
        cfg.augment_mode = AugmentMode::Label;
      } else if (*v == "class-vector") {
        cfg.augment_mode = AugmentMode::ClassVector;
      } else {
        throw Error(Errc::InvalidArgument, "augment_mode must be label or class-vector");
      }
    }
    if (auto v = get("threads")) cfg.threads = to_number<unsigned>(*v);
  }
  cfg.validate();
  return cfg;
}

TrainConfig read_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_train_config(buf.str());
}

void apply_scale(ExperimentConfig& cfg, const std::string& scale) {
  if (scale == "desk") return;
  if (scale != "paper") throw Error(Errc::InvalidArgument, "scale must be desk or paper");
  cfg.sim.sample_count = 1'000'000;
  cfg.gini.dims = {2, 3, 4, 5, 6, 7, 8};
}

}  // namespace dfx
