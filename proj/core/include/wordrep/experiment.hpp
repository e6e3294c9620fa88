#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wordrep/model.hpp"

namespace wordrep {

// One experiment = one config file. Flags may override only paths, the seed,
// thread count and verbosity; everything else lives here so experiments stay
// diffable artifacts.
struct ExperimentConfig {
  // [paths]
  std::string lexicon_path = "data/lexicon_demo.tsv";
  std::string inventory_path = "data/phoneme_inventory.tsv";
  std::string affix_path = "data/affixes.tsv";
  std::string output_dir = "out";

  // [dataset]
  size_t corpus_total = 1000000;
  int per_cell = 100;
  double filter_threshold = 0.25;

  // [model]
  ModelConfig model;

  // [grid]
  std::vector<std::string> grid_cells = {"lstm"};
  std::vector<int> grid_hidden_sizes = {64, 128};
  std::vector<double> grid_dropouts = {0.0, 0.1, 0.2};
  std::vector<int> grid_batch_sizes = {1024, 2048, 4096};
  std::vector<double> grid_learning_rates = {5e-3, 1e-3, 5e-4};
  int grid_folds = 5;
  int grid_early_stop_epoch = 75;

  // [analysis]
  bool emit_svg = true;
  int spearman_permutations = 10000;
  int regression_permutations = 1000;
  int mlem_bootstrap = 1000;
  int mlem_permutations = 1000;
  double ablation_threshold = 0.2;
  bool ablation_zero_cell = false;
  std::string representation_metric = "euclidean";  // or "cosine"

  // [run]
  uint64_t seed = 1;
  int threads = 0;  // 0 = logical cores
  int n_seeds = 10;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_string(const std::string& text, const std::string& origin = "<string>");
  std::string serialize() const;  // canonical form; load(serialize()) round-trips
  std::string hash() const;

  // Returns every problem found (unknown keys are caught at parse time);
  // when check_paths is set, referenced input files must exist.
  std::vector<std::string> validate(bool check_paths) const;

  bool operator==(const ExperimentConfig& other) const;
};

}  // namespace wordrep
