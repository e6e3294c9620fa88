#include "wordrep/ablation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

namespace wordrep {

AblationMask ablate_unit(const Checkpoint& ckpt, AblationMask::Side side, int unit, int layer,
                         bool zero_cell) {
  if (unit < 0 || unit >= ckpt.config.hidden_size)
    throw std::out_of_range("ablate_unit: unit " + std::to_string(unit) + " outside [0, " +
                            std::to_string(ckpt.config.hidden_size) + ")");
  if (layer < 0 || layer >= ckpt.config.num_layers)
    throw std::out_of_range("ablate_unit: layer " + std::to_string(layer) + " outside [0, " +
                            std::to_string(ckpt.config.num_layers) + ")");
  AblationMask mask;
  mask.side = side;
  mask.unit = unit;
  mask.layer = layer;
  mask.zero_cell = zero_cell;
  return mask;
}

namespace {

// Serial record production for one ablated view; the sweep parallelizes
// across locations instead of items.
std::vector<PredictionRecord> evaluate_serial(const Checkpoint& ckpt,
                                              const std::vector<std::vector<int>>& seqs,
                                              const AblationMask* mask) {
  std::vector<PredictionRecord> records(seqs.size());
  const int first_special = ckpt.config.vocab_size - 3;
  for (size_t i = 0; i < seqs.size(); ++i) {
    const auto state = encode(ckpt.params, ckpt.config, seqs[i], mask);
    auto out = decode_greedy(ckpt.params, ckpt.config, state, mask);
    std::vector<int> stripped;
    for (int t : out)
      if (t < first_special) stripped.push_back(t);
    PredictionRecord rec;
    rec.item_index = static_cast<int>(i);
    rec.target = seqs[i];
    rec.predicted = std::move(stripped);
    rec.edit = edit_distance(rec.target, rec.predicted);
    rec.correct = rec.edit.distance == 0;
    rec.errors_at_target_pos.assign(rec.target.size(), 0);
    int cursor = 0;
    const int L = static_cast<int>(rec.target.size());
    for (const auto& step : rec.edit.alignment) {
      switch (step.op) {
        case EditOp::kMatch: ++cursor; break;
        case EditOp::kSubstitute:
        case EditOp::kDelete:
          if (L > 0) ++rec.errors_at_target_pos[static_cast<size_t>(std::min(cursor, L - 1))];
          ++cursor;
          break;
        case EditOp::kInsert:
          if (L > 0) ++rec.errors_at_target_pos[static_cast<size_t>(std::min(cursor, L - 1))];
          break;
      }
    }
    records[i] = std::move(rec);
  }
  return records;
}

std::vector<AblationMask> sweep_locations(const ModelConfig& cfg, bool zero_cell) {
  std::vector<AblationMask> locations;
  for (const auto side : {AblationMask::Side::kEncoder, AblationMask::Side::kDecoder}) {
    for (int layer = 0; layer < cfg.num_layers; ++layer) {
      for (int unit = 0; unit < cfg.hidden_size; ++unit) {
        AblationMask m;
        m.side = side;
        m.layer = layer;
        m.unit = unit;
        m.zero_cell = zero_cell;
        locations.push_back(m);
      }
    }
  }
  return locations;
}

}  // namespace

std::vector<AblationRecord> ablation_sweep(const Checkpoint& ckpt, const EvalDataset& factorial,
                                           const SonorityDataset* sonority, ThreadPool& pool,
                                           const SweepOptions& options) {
  if (!factorial.inventory_checksum.empty() &&
      factorial.inventory_checksum != ckpt.inventory_checksum)
    throw std::runtime_error("ablation_sweep: factorial dataset inventory mismatch");
  if (sonority && !sonority->inventory_checksum.empty() &&
      sonority->inventory_checksum != ckpt.inventory_checksum)
    throw std::runtime_error("ablation_sweep: sonority dataset inventory mismatch");

  std::vector<std::vector<int>> fact_seqs;
  fact_seqs.reserve(factorial.items.size());
  for (const auto& item : factorial.items) fact_seqs.push_back(item.phonemes);
  std::vector<std::vector<int>> son_seqs;
  if (sonority && options.with_sonority) {
    son_seqs.reserve(sonority->items.size());
    for (const auto& item : sonority->items)
      son_seqs.emplace_back(item.tokens.begin(), item.tokens.end());
  }

  const auto locations = sweep_locations(ckpt.config, options.zero_cell);
  std::vector<AblationRecord> records(locations.size());

  pool.parallel_for(locations.size(), [&](size_t lo, size_t hi, int) {
    for (size_t li = lo; li < hi; ++li) {
      const AblationMask& mask = locations[li];
      AblationRecord& rec = records[li];
      rec.location = mask;

      const auto fact_records = evaluate_serial(ckpt, fact_seqs, &mask);
      rec.factorial = summarize(fact_records);

      struct Tally {
        long n = 0, wrong = 0;
        double rate() const { return n > 0 ? static_cast<double>(wrong) / static_cast<double>(n) : 0.0; }
      };
      std::map<std::string, Tally> split;
      Tally real, pseudo;
      std::vector<double> pseudo_len, pseudo_err;
      for (const auto& r : fact_records) {
        const auto& item = factorial.items[static_cast<size_t>(r.item_index)];
        const bool wrong = !r.correct;
        auto bump = [&](const std::string& key) {
          auto& t = split[key];
          t.n += 1;
          t.wrong += wrong;
        };
        if (item.lexicality == Lexicality::kReal) {
          real.n += 1;
          real.wrong += wrong;
        } else {
          pseudo.n += 1;
          pseudo.wrong += wrong;
          pseudo_len.push_back(static_cast<double>(item.phonemes.size()));
          pseudo_err.push_back(wrong ? 1.0 : 0.0);
        }
        bump(std::string(to_string(item.length_class)));
        bump(std::string(to_string(item.morphology)));
        if (item.freq_class != FreqClass::kNA) bump(std::string(to_string(item.freq_class)));
        const ErrorType t = classify_error(r.target, r.predicted);
        if (t != ErrorType::kNone) {
          rec.incorrect += 1;
          rec.error_type_counts[static_cast<size_t>(t) - 1] += 1;
        }
      }
      rec.real_error_rate = real.rate();
      rec.pseudo_error_rate = pseudo.rate();
      rec.diagonal_distance = rec.pseudo_error_rate - rec.real_error_rate;
      for (const auto& [key, tally] : split) rec.split_error_rate[key] = tally.rate();
      rec.pseudo_length_rho =
          spearman(pseudo_len, pseudo_err, options.spearman_permutations,
                   hash_mix(options.seed, static_cast<uint64_t>(li)));
      rec.positional = positional_error_profile(fact_records);

      if (!son_seqs.empty()) {
        const auto son_records = evaluate_serial(ckpt, son_seqs, &mask);
        rec.sonority = summarize(son_records);
        const auto effect = sonority_effect(son_records, *sonority, options.spearman_permutations,
                                            hash_mix(options.seed, static_cast<uint64_t>(li) + 7777));
        rec.ccv_rho = effect.ccv_rho;
        rec.vcc_rho = effect.vcc_rho;
      }
    }
  });

  std::stable_sort(records.begin(), records.end(), [](const AblationRecord& a, const AblationRecord& b) {
    return a.factorial.error_rate > b.factorial.error_rate;
  });
  return records;
}

UnitProfile unit_effect_profile(const std::vector<PredictionRecord>& records,
                                const EvalDataset& dataset, const AblationMask& location,
                                int n_fi_permutations, uint64_t seed) {
  UnitProfile profile;
  profile.location = location;
  bool any_error = false;
  for (const auto& r : records)
    if (!r.correct) {
      any_error = true;
      break;
    }
  if (!any_error) {
    profile.degenerate = true;
    return profile;
  }
  RegressionOptions opts;
  opts.include_frequency = true;
  opts.n_coef_permutations = n_fi_permutations;
  opts.n_fi_permutations = n_fi_permutations;
  opts.seed = seed;
  const RegressionReport report = regression_fi(records, dataset, opts);
  for (const auto& fi : report.fi) {
    if (fi.name == "lexicality") profile.fi[0] = fi.signed_importance;
    else if (fi.name == "morphology") profile.fi[1] = fi.signed_importance;
    else if (fi.name == "length") profile.fi[2] = fi.signed_importance;
    else if (fi.name == "frequency") profile.fi[3] = fi.signed_importance;
  }
  return profile;
}

std::vector<UnitProfile> sweep_unit_profiles(const Checkpoint& ckpt, const EvalDataset& factorial,
                                             ThreadPool& pool, const SweepOptions& options,
                                             int n_fi_permutations) {
  std::vector<std::vector<int>> fact_seqs;
  fact_seqs.reserve(factorial.items.size());
  for (const auto& item : factorial.items) fact_seqs.push_back(item.phonemes);
  const auto locations = sweep_locations(ckpt.config, options.zero_cell);
  std::vector<UnitProfile> profiles(locations.size());
  pool.parallel_for(locations.size(), [&](size_t lo, size_t hi, int) {
    for (size_t li = lo; li < hi; ++li) {
      const auto records = evaluate_serial(ckpt, fact_seqs, &locations[li]);
      profiles[li] = unit_effect_profile(records, factorial, locations[li], n_fi_permutations,
                                         hash_mix(options.seed, static_cast<uint64_t>(li)));
    }
  });
  return profiles;
}

ClusterReport cluster_unit_profiles(const std::vector<UnitProfile>& profiles, int restarts,
                                    uint64_t seed) {
  if (profiles.size() < 9)
    throw std::invalid_argument("cluster_unit_profiles: need at least 9 profiles");
  Eigen::MatrixXd points(static_cast<Eigen::Index>(profiles.size()), 4);
  for (size_t i = 0; i < profiles.size(); ++i)
    for (int j = 0; j < 4; ++j)
      points(static_cast<Eigen::Index>(i), j) = profiles[i].fi[static_cast<size_t>(j)];
  return select_k_by_silhouette(points, 2, 8, restarts, seed);
}

std::string sweep_to_tsv(const std::vector<AblationRecord>& records) {
  std::ostringstream out;
  out << "side\tlayer\tunit\tzero_cell\terror_rate\treal_error\tpseudo_error\tdiagonal_distance\t"
         "mean_edit_distance\tlength_errors\tposition_errors\tidentity_errors\tother_errors\t"
         "pseudo_length_rho\tccv_rho\tvcc_rho\tsonority_error\n";
  for (const auto& r : records) {
    out << to_string(r.location.side) << '\t' << r.location.layer << '\t' << r.location.unit << '\t'
        << (r.location.zero_cell ? 1 : 0) << '\t' << format_double(r.factorial.error_rate) << '\t'
        << format_double(r.real_error_rate) << '\t' << format_double(r.pseudo_error_rate) << '\t'
        << format_double(r.diagonal_distance) << '\t' << format_double(r.factorial.mean_edit_distance)
        << '\t' << r.error_type_counts[0] << '\t' << r.error_type_counts[1] << '\t'
        << r.error_type_counts[2] << '\t' << r.error_type_counts[3] << '\t'
        << (r.pseudo_length_rho.defined ? format_double(r.pseudo_length_rho.rho) : "na") << '\t'
        << (r.ccv_rho.defined ? format_double(r.ccv_rho.rho) : "na") << '\t'
        << (r.vcc_rho.defined ? format_double(r.vcc_rho.rho) : "na") << '\t'
        << format_double(r.sonority.error_rate) << '\n';
  }
  return out.str();
}

}  // namespace wordrep
