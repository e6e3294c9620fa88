#pragma once

#include <string>
#include <vector>

#include "wordrep/train.hpp"

namespace wordrep {

struct GridFoldResult {
  int fold = 0;
  double train_word_error = 0.0;
  double val_word_error = 0.0;
  double val_phoneme_error = 0.0;  // summed edit distance / summed target length
};

struct GridEntry {
  ModelConfig config;
  long param_count = 0;
  std::vector<GridFoldResult> folds;
  double mean_train_word_error = 0.0;
  double mean_val_word_error = 0.0;
  double mean_val_phoneme_error = 0.0;
};

struct GridReport {
  std::vector<GridEntry> entries;  // sorted best-first
  std::vector<std::string> warnings;
  int k_folds = 5;
  int early_stop_epoch = 75;
  size_t corpus_total = 0;
  uint64_t seed = 0;
};

// 5-fold (by default) cross-validated grid search. Each fold's training
// corpus is resampled to corpus_total from the fold-train lexicon; training
// stops at early_stop_epoch. Configs are ranked by perfect train accuracy
// first, then highest mean validation word accuracy, then fewest parameters.
GridReport cross_validate_grid(const std::vector<ModelConfig>& grid, const Lexicon& lexicon,
                               const Inventory& inventory, size_t corpus_total, int k_folds,
                               int early_stop_epoch, uint64_t seed, ThreadPool& pool);

std::string grid_report_to_tsv(const GridReport& report);

}  // namespace wordrep
