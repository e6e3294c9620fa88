#include "wordrep/replication.hpp"

#include <stdexcept>

namespace wordrep {

ReplicationReport multi_seed_replication(const ModelConfig& base, int n_seeds, const Lexicon& lexicon,
                                         size_t corpus_total, const Inventory& inventory,
                                         const EvalDataset& factorial, const SonorityDataset& sonority,
                                         ThreadPool& pool, const ReplicationOptions& options) {
  if (n_seeds < 1) throw std::invalid_argument("multi_seed_replication: n_seeds must be >= 1");
  ReplicationReport report;
  report.ablation_threshold = options.ablation_threshold;

  // One corpus shared by every seed; only the model seed varies.
  const auto corpus = sample_corpus(lexicon, corpus_total, options.corpus_seed);

  for (int s = 1; s <= n_seeds; ++s) {
    SeedReport sr;
    sr.seed = static_cast<uint64_t>(s);
    Checkpoint ckpt;
    try {
      ModelConfig cfg = base;
      cfg.seed = static_cast<uint64_t>(s);
      ckpt = train_model(cfg, lexicon, corpus, inventory, pool);
    } catch (const std::exception& ex) {
      throw std::runtime_error("multi_seed_replication: seed " + std::to_string(s) +
                               " failed: " + ex.what());
    }
    sr.first_zero_epoch = ckpt.first_zero_epoch;
    sr.final_train_error = ckpt.log.empty() ? 1.0 : ckpt.log.back().train_word_error;

    const auto records = evaluate_dataset(ckpt, factorial, pool);
    std::vector<PredictionRecord> real_records, pseudo_records;
    std::vector<double> pseudo_len, pseudo_err;
    for (const auto& r : records) {
      const auto& item = factorial.items[static_cast<size_t>(r.item_index)];
      if (item.lexicality == Lexicality::kReal) {
        real_records.push_back(r);
      } else {
        pseudo_records.push_back(r);
        pseudo_len.push_back(static_cast<double>(item.phonemes.size()));
        pseudo_err.push_back(r.correct ? 0.0 : 1.0);
      }
    }
    sr.real = summarize(real_records);
    sr.pseudo = summarize(pseudo_records);
    sr.pseudo_length_rho = spearman(pseudo_len, pseudo_err, options.spearman_permutations,
                                    hash_mix(17, static_cast<uint64_t>(s)));
    sr.positional = positional_error_profile_split(records, factorial);

    const auto sonority_records = evaluate_sonority(ckpt, sonority, pool);
    sr.sonority = sonority_effect(sonority_records, sonority, options.spearman_permutations,
                                  hash_mix(23, static_cast<uint64_t>(s)));

    if (options.run_sweep) {
      SweepOptions sweep_opts;
      sweep_opts.seed = hash_mix(31, static_cast<uint64_t>(s));
      const auto sweep = ablation_sweep(ckpt, factorial, &sonority, pool, sweep_opts);
      for (const auto& rec : sweep)
        if (rec.factorial.error_rate > options.ablation_threshold) ++sr.strong_units;
      if (!sweep.empty()) {
        const auto& top = sweep.front();  // sorted by error rate
        sr.strongest = top.location;
        sr.strongest_error_rate = top.factorial.error_rate;
        sr.strongest_is_encoder = top.location.side == AblationMask::Side::kEncoder;
        if (top.incorrect > 0)
          sr.strongest_length_fraction =
              static_cast<double>(top.error_type_counts[0]) / static_cast<double>(top.incorrect);
        sr.strongest_predominantly_length = sr.strongest_length_fraction > 0.5;
      }
    }
    report.seeds.push_back(std::move(sr));
  }

  auto aggregate = [&](const std::string& name, auto getter) {
    std::vector<double> values;
    for (const auto& sr : report.seeds) values.push_back(getter(sr));
    report.aggregates.emplace_back(name, mean_ci(values));
  };
  aggregate("real_error_rate", [](const SeedReport& s) { return s.real.error_rate; });
  aggregate("pseudo_error_rate", [](const SeedReport& s) { return s.pseudo.error_rate; });
  aggregate("pseudo_length_rho", [](const SeedReport& s) { return s.pseudo_length_rho.rho; });
  aggregate("ccv_rho", [](const SeedReport& s) { return s.sonority.ccv_rho.rho; });
  aggregate("vcc_rho", [](const SeedReport& s) { return s.sonority.vcc_rho.rho; });
  aggregate("first_zero_epoch",
            [](const SeedReport& s) { return static_cast<double>(s.first_zero_epoch); });
  if (options.run_sweep) {
    aggregate("strong_units", [](const SeedReport& s) { return static_cast<double>(s.strong_units); });
    aggregate("strongest_error_rate", [](const SeedReport& s) { return s.strongest_error_rate; });
    aggregate("strongest_length_fraction",
              [](const SeedReport& s) { return s.strongest_length_fraction; });
  }
  return report;
}

}  // namespace wordrep
