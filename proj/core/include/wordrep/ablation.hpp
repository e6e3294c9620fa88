#pragma once

#include <map>

#include "wordrep/evaluation.hpp"
#include "wordrep/kmeans.hpp"

namespace wordrep {

// Validated ablation view over a checkpoint: the returned mask drives the
// evaluation paths; the checkpoint itself is never modified.
AblationMask ablate_unit(const Checkpoint& ckpt, AblationMask::Side side, int unit, int layer = 0,
                         bool zero_cell = false);

struct AblationRecord {
  AblationMask location;
  EvalSummary factorial;  // all factorial items
  double real_error_rate = 0.0;
  double pseudo_error_rate = 0.0;
  double diagonal_distance = 0.0;  // pseudo minus real error rate
  std::map<std::string, double> split_error_rate;  // short/long/simple/complex/high/low
  std::array<long, 4> error_type_counts{};         // length, position, identity, other
  long incorrect = 0;
  SpearmanResult pseudo_length_rho;
  PositionalProfile positional;
  EvalSummary sonority;
  SpearmanResult ccv_rho, vcc_rho;
};

struct SweepOptions {
  bool zero_cell = false;
  bool with_sonority = true;
  int spearman_permutations = 1000;
  uint64_t seed = 1;
};

// Re-evaluates the model with every (side, layer, unit) zeroed one at a
// time: 2 * layers * H records, sorted by factorial error rate descending.
// Locations run in parallel; the source checkpoint is untouched.
std::vector<AblationRecord> ablation_sweep(const Checkpoint& ckpt, const EvalDataset& factorial,
                                           const SonorityDataset* sonority, ThreadPool& pool,
                                           const SweepOptions& options = {});

struct UnitProfile {
  AblationMask location;
  std::array<double, 4> fi{};  // lexicality, morphology, length, frequency (signed)
  bool degenerate = false;     // no errors, nothing to regress
};

// Feature-importance profile of one ablated model's factorial records, with
// frequency included as a main effect.
UnitProfile unit_effect_profile(const std::vector<PredictionRecord>& records,
                                const EvalDataset& dataset, const AblationMask& location,
                                int n_fi_permutations = 200, uint64_t seed = 1);

// Profiles for every sweep location (same order/parallelism as the sweep).
std::vector<UnitProfile> sweep_unit_profiles(const Checkpoint& ckpt, const EvalDataset& factorial,
                                             ThreadPool& pool, const SweepOptions& options = {},
                                             int n_fi_permutations = 200);

// k-means over the profile vectors, k selected by silhouette over [2, 8].
ClusterReport cluster_unit_profiles(const std::vector<UnitProfile>& profiles, int restarts = 50,
                                    uint64_t seed = 1);

std::string sweep_to_tsv(const std::vector<AblationRecord>& records);

}  // namespace wordrep
