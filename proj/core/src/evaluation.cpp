#include "wordrep/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

namespace wordrep {

namespace {

std::vector<int> strip_specials(const std::vector<int>& tokens, int first_special_id) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (int t : tokens)
    if (t < first_special_id) out.push_back(t);
  return out;
}

PredictionRecord make_record(int index, const std::vector<int>& target,
                             std::vector<int> predicted_stripped) {
  PredictionRecord rec;
  rec.item_index = index;
  rec.target = target;
  rec.predicted = std::move(predicted_stripped);
  rec.edit = edit_distance(rec.target, rec.predicted);
  rec.correct = rec.edit.distance == 0;
  rec.errors_at_target_pos.assign(rec.target.size(), 0);
  const int L = static_cast<int>(rec.target.size());
  int cursor = 0;
  for (const auto& step : rec.edit.alignment) {
    switch (step.op) {
      case EditOp::kMatch:
        ++cursor;
        break;
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
  return rec;
}

}  // namespace

EvalSummary summarize(const std::vector<PredictionRecord>& records) {
  EvalSummary s;
  s.n = static_cast<int>(records.size());
  if (records.empty()) return s;
  s.defined = true;
  long wrong = 0;
  double dist = 0.0;
  for (const auto& r : records) {
    wrong += r.edit.distance > 0;
    dist += r.edit.distance;
  }
  s.error_rate = static_cast<double>(wrong) / static_cast<double>(s.n);
  s.mean_edit_distance = dist / static_cast<double>(s.n);
  return s;
}

std::vector<PredictionRecord> evaluate_sequences(const ModelParams<float>& params,
                                                 const ModelConfig& cfg,
                                                 const std::vector<std::vector<int>>& sequences,
                                                 ThreadPool& pool, const AblationMask* ablation) {
  std::vector<PredictionRecord> records(sequences.size());
  const int first_special = cfg.vocab_size - 3;
  pool.parallel_for(sequences.size(), [&](size_t lo, size_t hi, int) {
    for (size_t i = lo; i < hi; ++i) {
      const auto state = encode(params, cfg, sequences[i], ablation);
      auto out = decode_greedy(params, cfg, state, ablation);
      records[i] = make_record(static_cast<int>(i), sequences[i], strip_specials(out, first_special));
    }
  });
  return records;
}

std::vector<PredictionRecord> evaluate_dataset(const Checkpoint& ckpt, const EvalDataset& dataset,
                                               ThreadPool& pool, const AblationMask* ablation) {
  if (!dataset.inventory_checksum.empty() && dataset.inventory_checksum != ckpt.inventory_checksum)
    throw std::runtime_error("evaluate_dataset: dataset inventory checksum " +
                             dataset.inventory_checksum + " does not match checkpoint " +
                             ckpt.inventory_checksum);
  std::vector<std::vector<int>> seqs;
  seqs.reserve(dataset.items.size());
  for (const auto& item : dataset.items) seqs.push_back(item.phonemes);
  return evaluate_sequences(ckpt.params, ckpt.config, seqs, pool, ablation);
}

std::vector<PredictionRecord> evaluate_sonority(const Checkpoint& ckpt,
                                                const SonorityDataset& dataset, ThreadPool& pool,
                                                const AblationMask* ablation) {
  if (!dataset.inventory_checksum.empty() && dataset.inventory_checksum != ckpt.inventory_checksum)
    throw std::runtime_error("evaluate_sonority: dataset inventory checksum does not match checkpoint");
  std::vector<std::vector<int>> seqs;
  seqs.reserve(dataset.items.size());
  for (const auto& item : dataset.items)
    seqs.emplace_back(item.tokens.begin(), item.tokens.end());
  return evaluate_sequences(ckpt.params, ckpt.config, seqs, pool, ablation);
}

PositionalProfile positional_error_profile(const std::vector<PredictionRecord>& records, int n_bins) {
  PositionalProfile prof;
  prof.n_bins = n_bins;
  prof.errors.assign(static_cast<size_t>(n_bins), 0);
  prof.opportunities.assign(static_cast<size_t>(n_bins), 0);
  prof.rate.assign(static_cast<size_t>(n_bins), 0.0);
  for (const auto& r : records) {
    const int L = static_cast<int>(r.target.size());
    for (int t = 0; t < L; ++t) {
      const double rel = L > 1 ? static_cast<double>(t) / static_cast<double>(L - 1) : 0.0;
      int bin = static_cast<int>(rel * n_bins);
      if (bin >= n_bins) bin = n_bins - 1;
      prof.opportunities[static_cast<size_t>(bin)] += 1;
      prof.errors[static_cast<size_t>(bin)] += r.errors_at_target_pos[static_cast<size_t>(t)];
    }
  }
  for (int b = 0; b < n_bins; ++b) {
    if (prof.opportunities[static_cast<size_t>(b)] > 0)
      prof.rate[static_cast<size_t>(b)] = static_cast<double>(prof.errors[static_cast<size_t>(b)]) /
                                          static_cast<double>(prof.opportunities[static_cast<size_t>(b)]);
  }
  return prof;
}

LexicalityProfiles positional_error_profile_split(const std::vector<PredictionRecord>& records,
                                                  const EvalDataset& dataset, int n_bins) {
  std::vector<PredictionRecord> real, pseudo;
  for (const auto& r : records) {
    const auto& item = dataset.items.at(static_cast<size_t>(r.item_index));
    (item.lexicality == Lexicality::kReal ? real : pseudo).push_back(r);
  }
  LexicalityProfiles out;
  out.real = positional_error_profile(real, n_bins);
  out.pseudo = positional_error_profile(pseudo, n_bins);
  out.combined = positional_error_profile(records, n_bins);
  return out;
}

SonorityEffect sonority_effect(const std::vector<PredictionRecord>& records,
                               const SonorityDataset& dataset, int n_permutations, uint64_t seed) {
  SonorityEffect effect;
  std::vector<double> x_ccv, y_ccv, x_vcc, y_vcc;
  std::map<int, std::pair<long, long>> table_ccv, table_vcc;  // gradient -> (n, errors)
  for (const auto& r : records) {
    const auto& item = dataset.items.at(static_cast<size_t>(r.item_index));
    const double err = r.correct ? 0.0 : 1.0;
    if (item.tpl == SyllableTemplate::kCCV) {
      x_ccv.push_back(item.gradient);
      y_ccv.push_back(err);
      auto& cell = table_ccv[item.gradient];
      cell.first += 1;
      cell.second += err > 0;
    } else {
      x_vcc.push_back(item.gradient);
      y_vcc.push_back(err);
      auto& cell = table_vcc[item.gradient];
      cell.first += 1;
      cell.second += err > 0;
    }
  }
  effect.ccv_rho = spearman(x_ccv, y_ccv, n_permutations, seed);
  effect.vcc_rho = spearman(x_vcc, y_vcc, n_permutations, seed + 1);
  for (const auto& [g, cell] : table_ccv)
    effect.ccv_table.push_back(
        {g, cell.first, cell.second,
         cell.first > 0 ? static_cast<double>(cell.second) / static_cast<double>(cell.first) : 0.0});
  for (const auto& [g, cell] : table_vcc)
    effect.vcc_table.push_back(
        {g, cell.first, cell.second,
         cell.first > 0 ? static_cast<double>(cell.second) / static_cast<double>(cell.first) : 0.0});
  return effect;
}

std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::kNone: return "none";
    case ErrorType::kLength: return "length";
    case ErrorType::kPosition: return "position";
    case ErrorType::kIdentity: return "identity";
    case ErrorType::kOther: return "other";
  }
  return "?";
}

ErrorType classify_error(std::span<const int> target, std::span<const int> prediction) {
  if (target.size() == prediction.size() &&
      std::equal(target.begin(), target.end(), prediction.begin()))
    return ErrorType::kNone;
  if (prediction.size() < target.size() &&
      std::equal(prediction.begin(), prediction.end(), target.begin()))
    return ErrorType::kLength;
  if (target.size() == prediction.size()) {
    std::vector<int> a(target.begin(), target.end());
    std::vector<int> b(prediction.begin(), prediction.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a == b) return ErrorType::kPosition;
    return ErrorType::kIdentity;
  }
  return ErrorType::kOther;
}

namespace {

struct DesignSpec {
  std::vector<std::string> main_names;
  std::vector<std::pair<int, int>> interactions;  // indices into mains
};

Eigen::MatrixXd build_design(const Eigen::MatrixXd& mains, const DesignSpec& spec) {
  const Eigen::Index n = mains.rows();
  Eigen::MatrixXd X(n, 1 + mains.cols() + static_cast<Eigen::Index>(spec.interactions.size()));
  X.col(0).setOnes();
  X.middleCols(1, mains.cols()) = mains;
  Eigen::Index col = 1 + mains.cols();
  for (const auto& [a, b] : spec.interactions)
    X.col(col++) = mains.col(a).cwiseProduct(mains.col(b));
  return X;
}

}  // namespace

RegressionReport regression_fi(const std::vector<PredictionRecord>& records,
                               const EvalDataset& dataset, const RegressionOptions& options) {
  if (records.empty()) throw std::invalid_argument("regression_fi: no records");

  // Canonical record order (by dataset item) makes the report independent of
  // the order records arrive in.
  std::vector<const PredictionRecord*> ordered;
  ordered.reserve(records.size());
  for (const auto& r : records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const PredictionRecord* a, const PredictionRecord* b) {
              return a->item_index < b->item_index;
            });

  DesignSpec spec;
  spec.main_names = {"lexicality", "morphology", "length"};
  if (options.include_frequency) spec.main_names.push_back("frequency");
  spec.interactions = {{0, 1}, {0, 2}, {1, 2}};  // pairwise among the design factors

  const Eigen::Index n = static_cast<Eigen::Index>(ordered.size());
  Eigen::MatrixXd mains(n, static_cast<Eigen::Index>(spec.main_names.size()));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = *ordered[static_cast<size_t>(i)];
    const auto& item = dataset.items.at(static_cast<size_t>(rec.item_index));
    mains(i, 0) = item.lexicality == Lexicality::kPseudo ? 1.0 : 0.0;
    mains(i, 1) = item.morphology == Morphology::kComplex ? 1.0 : 0.0;
    mains(i, 2) = static_cast<double>(item.phonemes.size());
    if (options.include_frequency) mains(i, 3) = item.zipf.value_or(0.0);
    y(i) = options.response_indicator ? (rec.correct ? 0.0 : 1.0)
                                      : static_cast<double>(rec.edit.distance);
  }

  RegressionReport report;
  report.n = static_cast<int>(n);
  report.response = options.response_indicator ? "error_indicator" : "edit_distance";

  std::vector<std::string> term_names = {"intercept"};
  term_names.insert(term_names.end(), spec.main_names.begin(), spec.main_names.end());
  for (const auto& [a, b] : spec.interactions)
    term_names.push_back(spec.main_names[static_cast<size_t>(a)] + ":" +
                         spec.main_names[static_cast<size_t>(b)]);

  const Eigen::MatrixXd X = build_design(mains, spec);

  const double sst = (y.array() - y.mean()).square().sum();
  if (sst <= 0.0) {
    report.degenerate = true;
    for (const auto& name : term_names) report.terms.push_back({name, 0.0, 1.0});
    for (const auto& name : spec.main_names) report.fi.push_back({name, 0.0, 0.0});
    return report;
  }

  const auto dependent = collinear_columns(X);
  if (!dependent.empty()) {
    std::string names;
    for (int c : dependent) names += (names.empty() ? "" : ", ") + term_names[static_cast<size_t>(c)];
    throw std::runtime_error("regression_fi: rank-deficient design; collinear columns: " + names);
  }

  const OlsResult fit = ols(X, y);
  report.r2 = fit.r2;

  // Permutation p-values for the coefficients.
  Rng rng = Rng(options.seed).child("regression");
  std::vector<long> hits(static_cast<size_t>(X.cols()), 0);
  {
    Rng perm_rng = rng.child("coef-permutation");
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Eigen::VectorXd y_perm(n);
    for (int b = 0; b < options.n_coef_permutations; ++b) {
      perm_rng.shuffle(idx);
      for (Eigen::Index i = 0; i < n; ++i) y_perm(i) = y(idx[static_cast<size_t>(i)]);
      const Eigen::VectorXd beta_perm =
          Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(X).solve(y_perm);
      for (Eigen::Index c = 0; c < X.cols(); ++c)
        if (std::abs(beta_perm(c)) >= std::abs(fit.beta(c)) - 1e-12) ++hits[static_cast<size_t>(c)];
    }
  }
  for (size_t c = 0; c < term_names.size(); ++c) {
    report.terms.push_back({term_names[c], fit.beta(static_cast<Eigen::Index>(c)),
                            static_cast<double>(hits[c] + 1) /
                                static_cast<double>(options.n_coef_permutations + 1)});
  }

  // Permutation feature importance: shuffle one raw feature, rebuild the
  // design (interactions included), and measure the R^2 drop under the
  // original coefficients.
  for (size_t m = 0; m < spec.main_names.size(); ++m) {
    Rng fi_rng = rng.child("fi-permutation").child(static_cast<uint64_t>(m));
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    double drop_sum = 0.0;
    Eigen::MatrixXd mains_perm = mains;
    for (int b = 0; b < options.n_fi_permutations; ++b) {
      fi_rng.shuffle(idx);
      for (Eigen::Index i = 0; i < n; ++i)
        mains_perm(i, static_cast<Eigen::Index>(m)) = mains(idx[static_cast<size_t>(i)],
                                                            static_cast<Eigen::Index>(m));
      const Eigen::MatrixXd X_perm = build_design(mains_perm, spec);
      drop_sum += fit.r2 - r_squared(X_perm, fit.beta, y);
    }
    const double importance = drop_sum / static_cast<double>(options.n_fi_permutations);
    const double coef = fit.beta(static_cast<Eigen::Index>(1 + m));
    report.fi.push_back({spec.main_names[m], importance, coef < 0 ? -importance : importance});
  }
  return report;
}

std::vector<ErrorTypeRow> error_type_table(const std::vector<PredictionRecord>& records,
                                           const EvalDataset& dataset) {
  std::map<int, ErrorTypeRow> rows;
  for (const auto& r : records) {
    const auto& item = dataset.items.at(static_cast<size_t>(r.item_index));
    auto& row = rows[item.condition_id];
    if (row.n == 0) {
      row.condition_id = item.condition_id;
      if (item.condition_id >= 1 && item.condition_id <= 12)
        row.label = condition_label(condition_table()[static_cast<size_t>(item.condition_id - 1)]);
    }
    row.n += 1;
    row.mean_insertions += r.edit.insertions;
    row.mean_deletions += r.edit.deletions;
    row.mean_substitutions += r.edit.substitutions;
    const ErrorType t = classify_error(r.target, r.predicted);
    if (t != ErrorType::kNone) {
      row.incorrect += 1;
      row.type_counts[static_cast<size_t>(t) - 1] += 1;
    }
  }
  std::vector<ErrorTypeRow> out;
  for (auto& [id, row] : rows) {
    if (row.n > 0) {
      row.mean_insertions /= static_cast<double>(row.n);
      row.mean_deletions /= static_cast<double>(row.n);
      row.mean_substitutions /= static_cast<double>(row.n);
    }
    out.push_back(row);
  }
  return out;
}

std::string records_to_tsv(const std::vector<PredictionRecord>& records, const EvalDataset& dataset,
                           const Inventory& inventory) {
  std::ostringstream out;
  out << "item\tcondition_id\tlexicality\tmorphology\tlength_class\tfreq_class\ttarget\tprediction\t"
         "correct\tdistance\tinsertions\tdeletions\tsubstitutions\terror_type\n";
  for (const auto& r : records) {
    const auto& item = dataset.items.at(static_cast<size_t>(r.item_index));
    out << r.item_index << '\t' << item.condition_id << '\t' << to_string(item.lexicality) << '\t'
        << to_string(item.morphology) << '\t' << to_string(item.length_class) << '\t'
        << to_string(item.freq_class) << '\t' << inventory.spell(r.target) << '\t'
        << inventory.spell(r.predicted) << '\t' << (r.correct ? 1 : 0) << '\t' << r.edit.distance
        << '\t' << r.edit.insertions << '\t' << r.edit.deletions << '\t' << r.edit.substitutions
        << '\t' << to_string(classify_error(r.target, r.predicted)) << '\n';
  }
  return out.str();
}

}  // namespace wordrep
