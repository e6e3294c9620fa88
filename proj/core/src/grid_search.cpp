#include "wordrep/grid_search.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wordrep/edit_distance.hpp"
#include "wordrep/ioutil.hpp"

namespace wordrep {

GridReport cross_validate_grid(const std::vector<ModelConfig>& grid, const Lexicon& lexicon,
                               const Inventory& inventory, size_t corpus_total, int k_folds,
                               int early_stop_epoch, uint64_t seed, ThreadPool& pool) {
  if (grid.empty()) throw std::invalid_argument("cross_validate_grid: empty grid");
  if (k_folds < 2) throw std::invalid_argument("cross_validate_grid: need at least 2 folds");
  if (lexicon.entries.size() < static_cast<size_t>(k_folds))
    throw std::invalid_argument("cross_validate_grid: lexicon smaller than fold count");

  GridReport report;
  report.k_folds = k_folds;
  report.early_stop_epoch = early_stop_epoch;
  report.corpus_total = corpus_total;
  report.seed = seed;

  // Fold assignment is shared by every config.
  std::vector<int> order(lexicon.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng fold_rng = Rng(seed).child("cv-folds");
  fold_rng.shuffle(order);
  std::vector<std::vector<int>> folds(static_cast<size_t>(k_folds));
  for (size_t i = 0; i < order.size(); ++i)
    folds[i % static_cast<size_t>(k_folds)].push_back(order[i]);

  // A fold too small to cover the factorial cells is flagged, not fatal.
  for (int f = 0; f < k_folds; ++f) {
    std::set<std::string> cells;
    for (int idx : folds[static_cast<size_t>(f)]) {
      const auto& e = lexicon.entries[static_cast<size_t>(idx)];
      if (e.length_class == LengthClass::kOther || e.freq_class == FreqClass::kNA) continue;
      cells.insert(std::string(to_string(e.morphology)) + "/" + std::string(to_string(e.length_class)) +
                   "/" + std::string(to_string(e.freq_class)));
    }
    if (cells.size() < 8)
      report.warnings.push_back("fold " + std::to_string(f) + " covers only " +
                                std::to_string(cells.size()) +
                                " of 8 factorial cells; condition-level validation is incomplete");
  }

  const int max_decode = static_cast<int>(lexicon.max_phoneme_length()) + 2;

  for (size_t ci = 0; ci < grid.size(); ++ci) {
    GridEntry entry;
    entry.config = grid[ci];
    for (int f = 0; f < k_folds; ++f) {
      Lexicon train_lex;
      train_lex.inventory_checksum = lexicon.inventory_checksum;
      std::vector<std::vector<int>> val_words;
      for (int g = 0; g < k_folds; ++g) {
        for (int idx : folds[static_cast<size_t>(g)]) {
          if (g == f) val_words.push_back(lexicon.entries[static_cast<size_t>(idx)].phonemes);
          else train_lex.entries.push_back(lexicon.entries[static_cast<size_t>(idx)]);
        }
      }

      ModelConfig cfg = grid[ci];
      cfg.epochs = early_stop_epoch;
      cfg.max_decode_len = max_decode;
      cfg.seed = hash_mix(grid[ci].seed, static_cast<uint64_t>(f) + 1);

      const auto corpus =
          sample_corpus(train_lex, corpus_total, hash_mix(seed, static_cast<uint64_t>(f) + 1));
      const Checkpoint ckpt = train_model(cfg, train_lex, corpus, inventory, pool);
      entry.param_count = ckpt.config.parameter_count();

      GridFoldResult fr;
      fr.fold = f;
      fr.train_word_error = ckpt.log.empty() ? 1.0 : ckpt.log.back().train_word_error;
      size_t n_wrong = 0, dist_sum = 0, len_sum = 0;
      std::vector<std::vector<int>> predictions(val_words.size());
      pool.parallel_for(val_words.size(), [&](size_t lo, size_t hi, int) {
        for (size_t i = lo; i < hi; ++i) {
          const auto st = encode(ckpt.params, ckpt.config, val_words[i]);
          predictions[i] = decode_greedy(ckpt.params, ckpt.config, st);
        }
      });
      for (size_t i = 0; i < val_words.size(); ++i) {
        const auto script = edit_distance(val_words[i], predictions[i]);
        n_wrong += script.distance > 0;
        dist_sum += static_cast<size_t>(script.distance);
        len_sum += val_words[i].size();
      }
      fr.val_word_error = val_words.empty() ? 0.0
                                            : static_cast<double>(n_wrong) /
                                                  static_cast<double>(val_words.size());
      fr.val_phoneme_error =
          len_sum == 0 ? 0.0 : static_cast<double>(dist_sum) / static_cast<double>(len_sum);
      entry.folds.push_back(fr);
    }

    for (const auto& fr : entry.folds) {
      entry.mean_train_word_error += fr.train_word_error;
      entry.mean_val_word_error += fr.val_word_error;
      entry.mean_val_phoneme_error += fr.val_phoneme_error;
    }
    const double kf = static_cast<double>(k_folds);
    entry.mean_train_word_error /= kf;
    entry.mean_val_word_error /= kf;
    entry.mean_val_phoneme_error /= kf;
    report.entries.push_back(std::move(entry));
  }

  // Rank: perfect train accuracy first, then highest validation accuracy,
  // then smallest model.
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const GridEntry& a, const GridEntry& b) {
                     const bool pa = a.mean_train_word_error == 0.0;
                     const bool pb = b.mean_train_word_error == 0.0;
                     if (pa != pb) return pa;
                     if (a.mean_val_word_error != b.mean_val_word_error)
                       return a.mean_val_word_error < b.mean_val_word_error;
                     return a.param_count < b.param_count;
                   });
  return report;
}

std::string grid_report_to_tsv(const GridReport& report) {
  std::ostringstream out;
  out << "rank\tcell\thidden\tlayers\tdropout\tbatch\tlr\tparams\ttrain_word_error\t"
         "val_word_error\tval_phoneme_error\n";
  int rank = 1;
  for (const auto& e : report.entries) {
    out << rank++ << '\t' << to_string(e.config.cell) << '\t' << e.config.hidden_size << '\t'
        << e.config.num_layers << '\t' << format_double(e.config.dropout) << '\t'
        << e.config.batch_size << '\t' << format_double(e.config.learning_rate) << '\t'
        << e.param_count << '\t' << format_double(e.mean_train_word_error) << '\t'
        << format_double(e.mean_val_word_error) << '\t' << format_double(e.mean_val_phoneme_error)
        << '\n';
  }
  return out.str();
}

}  // namespace wordrep
