#pragma once

#include "wordrep/ablation.hpp"
#include "wordrep/train.hpp"

namespace wordrep {

struct SeedReport {
  uint64_t seed = 0;
  int first_zero_epoch = -1;
  double final_train_error = 1.0;
  EvalSummary real, pseudo;
  SpearmanResult pseudo_length_rho;
  SonorityEffect sonority;
  LexicalityProfiles positional;
  int strong_units = 0;  // sweep locations above the error threshold
  AblationMask strongest;
  double strongest_error_rate = 0.0;
  double strongest_length_fraction = 0.0;  // of its errors classified `length`
  bool strongest_is_encoder = false;
  bool strongest_predominantly_length = false;
};

struct ReplicationReport {
  std::vector<SeedReport> seeds;
  double ablation_threshold = 0.2;
  // metric -> mean and 95% CI across seeds
  std::vector<std::pair<std::string, MeanCi>> aggregates;
};

struct ReplicationOptions {
  double ablation_threshold = 0.2;
  int spearman_permutations = 10000;
  uint64_t corpus_seed = 1;
  bool run_sweep = true;
};

// Trains n_seeds models (seeds 1..n_seeds) on the same corpus, runs the
// behavioral battery and the ablation sweep on each, and aggregates across
// seeds. A training failure aborts with the offending seed named.
ReplicationReport multi_seed_replication(const ModelConfig& base, int n_seeds, const Lexicon& lexicon,
                                         size_t corpus_total, const Inventory& inventory,
                                         const EvalDataset& factorial, const SonorityDataset& sonority,
                                         ThreadPool& pool, const ReplicationOptions& options = {});

}  // namespace wordrep
