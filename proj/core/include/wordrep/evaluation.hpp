#pragma once

#include <array>
#include <string>
#include <vector>

#include "wordrep/checkpoint.hpp"
#include "wordrep/datasets.hpp"
#include "wordrep/edit_distance.hpp"
#include "wordrep/stats.hpp"
#include "wordrep/threadpool.hpp"

namespace wordrep {

struct PredictionRecord {
  int item_index = 0;
  std::vector<int> target;     // phoneme ids, specials stripped
  std::vector<int> predicted;  // greedy decode, specials stripped
  bool correct = false;
  EditScript edit;
  // Error count per target position: substituted and deleted positions plus
  // insertions attributed to the following target position (end insertions
  // to the last position).
  std::vector<int> errors_at_target_pos;
};

struct EvalSummary {
  int n = 0;
  bool defined = false;  // false on an empty record list
  double error_rate = 0.0;
  double mean_edit_distance = 0.0;
};
EvalSummary summarize(const std::vector<PredictionRecord>& records);

// Greedy decoding over raw sequences (dropout off). Parallel over items.
std::vector<PredictionRecord> evaluate_sequences(const ModelParams<float>& params,
                                                 const ModelConfig& cfg,
                                                 const std::vector<std::vector<int>>& sequences,
                                                 ThreadPool& pool,
                                                 const AblationMask* ablation = nullptr);

// Dataset-level wrappers; reject datasets built against another inventory.
std::vector<PredictionRecord> evaluate_dataset(const Checkpoint& ckpt, const EvalDataset& dataset,
                                               ThreadPool& pool,
                                               const AblationMask* ablation = nullptr);
std::vector<PredictionRecord> evaluate_sonority(const Checkpoint& ckpt,
                                                const SonorityDataset& dataset, ThreadPool& pool,
                                                const AblationMask* ablation = nullptr);

struct PositionalProfile {
  int n_bins = 10;
  std::vector<long> errors;
  std::vector<long> opportunities;
  std::vector<double> rate;  // errors / opportunities per bin
};
// Relative position t/(L-1) binned into n_bins; every error in the alignment
// is counted independently.
PositionalProfile positional_error_profile(const std::vector<PredictionRecord>& records,
                                           int n_bins = 10);

struct LexicalityProfiles {
  PositionalProfile real, pseudo, combined;
};
LexicalityProfiles positional_error_profile_split(const std::vector<PredictionRecord>& records,
                                                  const EvalDataset& dataset, int n_bins = 10);

struct GradientStat {
  int gradient = 0;
  long n = 0;
  long errors = 0;
  double rate = 0.0;
};
struct SonorityEffect {
  SpearmanResult ccv_rho, vcc_rho;
  std::vector<GradientStat> ccv_table, vcc_table;
};
SonorityEffect sonority_effect(const std::vector<PredictionRecord>& records,
                               const SonorityDataset& dataset, int n_permutations = 10000,
                               uint64_t seed = 1);

enum class ErrorType { kNone, kLength, kPosition, kIdentity, kOther };
std::string_view to_string(ErrorType t);

// none: equal. length: prediction is a strict prefix (premature EOS).
// position: a permutation of the target. identity: same length, substitutions
// only. other: everything else. Precedence in that order.
ErrorType classify_error(std::span<const int> target, std::span<const int> prediction);

struct RegressionOptions {
  bool include_frequency = false;   // adds a frequency main effect (0 for pseudowords)
  bool response_indicator = false;  // response = error indicator instead of edit distance
  int n_coef_permutations = 1000;
  int n_fi_permutations = 1000;
  uint64_t seed = 1;
};

struct RegressionTerm {
  std::string name;
  double coef = 0.0;
  double p_value = 1.0;
};
struct FeatureImportance {
  std::string name;
  double importance = 0.0;         // mean R^2 drop when the feature is permuted
  double signed_importance = 0.0;  // importance signed by the regression coefficient
};
struct RegressionReport {
  std::vector<RegressionTerm> terms;
  std::vector<FeatureImportance> fi;
  double r2 = 0.0;
  int n = 0;
  std::string response;
  bool degenerate = false;  // constant response, nothing to fit
};

// OLS of model performance on lexicality, morphology, length and their
// pairwise interactions (frequency optional, main effect only), with
// permutation p-values and permutation feature importances.
RegressionReport regression_fi(const std::vector<PredictionRecord>& records,
                               const EvalDataset& dataset, const RegressionOptions& options = {});

struct ErrorTypeRow {
  int condition_id = 0;
  std::string label;
  long n = 0;
  long incorrect = 0;
  std::array<long, 4> type_counts{};  // length, position, identity, other
  double mean_insertions = 0.0, mean_deletions = 0.0, mean_substitutions = 0.0;
};
std::vector<ErrorTypeRow> error_type_table(const std::vector<PredictionRecord>& records,
                                           const EvalDataset& dataset);

// Records serialization for report artifacts.
std::string records_to_tsv(const std::vector<PredictionRecord>& records, const EvalDataset& dataset,
                           const Inventory& inventory);

}  // namespace wordrep
