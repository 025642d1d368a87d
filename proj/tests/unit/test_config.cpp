#include <gtest/gtest.h>

#include "dfx/config.hpp"
#include "dfx/error.hpp"

using namespace dfx;

TEST(ExperimentConfig, DefaultsAreValid) {
  const ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.sim.depths.size(), 15u);
  EXPECT_EQ(cfg.sim.models.size(), 7u);
  EXPECT_EQ(cfg.uci.rf_trees.front(), 50u);
  EXPECT_EQ(cfg.uci.rf_trees.back(), 1600u);
  EXPECT_EQ(cfg.uci.df_trees.back(), 800u);
}

TEST(ExperimentConfig, ParsesAllSections) {
  const ExperimentConfig cfg = parse_experiment_config(R"(
; comment
[experiment]
id = bounds
seed = 42
output_dir = out/b
threads = 2
wall_time = yes

[sim]
dims = 2, 4
sample_count = 5000
a = 5/2
depths = 1,2,3
models = T, DT-3, RF-9
target_accuracy = 0.95

[gini]
dims = 2,3
a = 3, 2

[bounds]
p = 2,4
n_max = 5
random_trees = 7
error_set_trees = 9

[uci]
datasets = segment
rf_trees = 10, 20
df_trees = 5, 10
df_layers = 3
tree_sizes = 8
manifest = m.ini
cache_dir = /tmp/c
offline = true
)");
  EXPECT_EQ(cfg.id, ExperimentId::Bounds);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.output_dir, "out/b");
  EXPECT_EQ(cfg.threads, 2u);
  EXPECT_TRUE(cfg.record_wall_time);
  EXPECT_EQ(cfg.sim.dims, (std::vector<int>{2, 4}));
  EXPECT_EQ(cfg.sim.a, (Rational{5, 2}));
  EXPECT_EQ(cfg.sim.models, (std::vector<std::string>{"T", "DT-3", "RF-9"}));
  EXPECT_DOUBLE_EQ(cfg.sim.target_accuracy, 0.95);
  EXPECT_EQ(cfg.gini.a_values.size(), 2u);
  EXPECT_EQ(cfg.gini.a_values[1], (Rational{2, 1}));
  EXPECT_EQ(cfg.bounds.p_values, (std::vector<int>{2, 4}));
  EXPECT_EQ(cfg.bounds.error_set_trees, 9u);
  EXPECT_EQ(cfg.uci.datasets, (std::vector<std::string>{"segment"}));
  EXPECT_EQ(cfg.uci.df_layers, 3u);
  EXPECT_TRUE(cfg.uci.offline);
  EXPECT_EQ(cfg.uci.cache_dir, "/tmp/c");
}

TEST(ExperimentConfig, Rejections) {
  EXPECT_THROW(parse_experiment_config("[experiment]\nid = nope\n"), Error);
  EXPECT_THROW(parse_experiment_config("[experiment]\ncolour = red\n"), Error);
  EXPECT_THROW(parse_experiment_config("[extra]\nx = 1\n"), Error);
  EXPECT_THROW(parse_experiment_config("[sim]\ndepths =\n"), Error);
  EXPECT_THROW(parse_experiment_config("[sim]\nmodels = T, XGB\n"), Error);
  EXPECT_THROW(parse_experiment_config("[sim]\nsample_count = many\n"), Error);
  EXPECT_THROW(parse_experiment_config("[uci]\nrf_trees = 1,2\ndf_trees = 1\n"), Error);
  EXPECT_THROW(parse_experiment_config("[sim]\na = 0\n"), Error);
  try {
    parse_experiment_config("[sim\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ExperimentConfig, Scale) {
  ExperimentConfig cfg;
  apply_scale(cfg, "desk");
  EXPECT_EQ(cfg.sim.sample_count, 100000u);
  apply_scale(cfg, "paper");
  EXPECT_GT(cfg.sim.sample_count, 100000u);
  EXPECT_EQ(cfg.gini.dims.back(), 8);
  EXPECT_THROW(apply_scale(cfg, "huge"), Error);
}

TEST(ExperimentConfig, Ids) {
  for (auto id : {ExperimentId::Sim, ExperimentId::Gini, ExperimentId::Bounds, ExperimentId::Uci}) {
    EXPECT_EQ(parse_experiment_id(to_string(id)), id);
  }
}

TEST(TrainConfigFile, Parses) {
  const TrainConfig cfg = parse_train_config(R"([train]
max_depth = 4
max_leaves = 16
min_samples_split = 3
seed = 9
n_trees = 11
feature_subsample = all
bootstrap = false
cascade_depth = 2
augment_mode = class-vector
threads = 2
)");
  EXPECT_EQ(cfg.max_depth, 4);
  EXPECT_EQ(cfg.max_leaves, 16u);
  EXPECT_EQ(cfg.min_samples_split, 3u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.n_trees, 11u);
  EXPECT_EQ(cfg.feature_subsample, FeatureSubsample::All);
  EXPECT_FALSE(cfg.bootstrap);
  EXPECT_EQ(cfg.cascade_depth, 2u);
  EXPECT_EQ(cfg.augment_mode, AugmentMode::ClassVector);
  EXPECT_EQ(cfg.threads, 2u);
  EXPECT_THROW(parse_train_config("[train]\nfeature_subsample = half\n"), Error);
  EXPECT_THROW(parse_train_config("[train]\nn_trees = 0\n"), Error);
  EXPECT_THROW(parse_train_config("[forest]\nn_trees = 3\n"), Error);
}
