#include "wordrep/train.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace wordrep {

ModelConfig resolve_config(ModelConfig cfg, const Inventory& inventory, size_t max_word_len) {
  cfg.vocab_size = inventory.vocab_size();
  if (cfg.max_decode_len == 0)
    cfg.max_decode_len = static_cast<int>(max_word_len) + 2;
  cfg.adam.lr = cfg.learning_rate;
  cfg.validate();
  return cfg;
}

double word_error_rate(const ModelParams<float>& params, const ModelConfig& cfg,
                       const std::vector<std::vector<int>>& words, ThreadPool& pool) {
  if (words.empty()) return 0.0;
  std::vector<uint8_t> wrong(words.size(), 0);
  pool.parallel_for(words.size(), [&](size_t lo, size_t hi, int) {
    for (size_t i = lo; i < hi; ++i) {
      const auto state = encode(params, cfg, words[i]);
      const auto out = decode_greedy(params, cfg, state);
      wrong[i] = out != words[i];
    }
  });
  size_t n_wrong = 0;
  for (uint8_t w : wrong) n_wrong += w;
  return static_cast<double>(n_wrong) / static_cast<double>(words.size());
}

Checkpoint train_model(const ModelConfig& raw_cfg, const Lexicon& lexicon,
                       std::span<const int> corpus, const Inventory& inventory, ThreadPool& pool,
                       const std::function<void(const EpochLog&)>& on_epoch) {
  if (lexicon.entries.empty()) throw std::invalid_argument("train_model: empty lexicon");
  if (corpus.empty()) throw std::invalid_argument("train_model: empty corpus");
  const ModelConfig cfg = resolve_config(raw_cfg, inventory, lexicon.max_phoneme_length());

  Rng rng(cfg.seed);
  ModelParams<float> params = ModelParams<float>::init(cfg, rng);
  auto views = tensor_views(params);
  AdamState<float> adam = AdamState<float>::like(views);

  const int sos = cfg.sos_id();
  const int eos = cfg.eos_id();
  const int pad = cfg.pad_id();

  const std::vector<std::vector<int>> words = lexicon.phoneme_sequences();
  const Rng item_streams = rng.child("item-streams");

  // Per-thread gradient accumulators, combined in chunk order so results are
  // reproducible at a fixed thread count.
  std::vector<ModelParams<float>> accums;
  std::vector<double> loss_sums(static_cast<size_t>(pool.size()), 0.0);
  std::vector<long> position_counts(static_cast<size_t>(pool.size()), 0);
  for (int i = 0; i < pool.size(); ++i) accums.push_back(ModelParams<float>::zeros(cfg));
  ModelParams<float> grads = ModelParams<float>::zeros(cfg);
  auto grad_views = tensor_views(grads);

  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.inventory_checksum = inventory.checksum();

  std::vector<int> order(corpus.begin(), corpus.end());
  const auto t_start = std::chrono::steady_clock::now();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng = rng.child("epoch-shuffle").child(static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss_sum = 0.0;
    long epoch_positions = 0;
    const size_t n_batches = (order.size() + static_cast<size_t>(cfg.batch_size) - 1) /
                             static_cast<size_t>(cfg.batch_size);
    for (size_t batch = 0; batch < n_batches; ++batch) {
      const size_t lo = batch * static_cast<size_t>(cfg.batch_size);
      const size_t hi = std::min(order.size(), lo + static_cast<size_t>(cfg.batch_size));
      size_t width = 0;
      for (size_t i = lo; i < hi; ++i)
        width = std::max(width, words[static_cast<size_t>(order[i])].size() + 1);

      for (int t = 0; t < pool.size(); ++t) {
        accums[static_cast<size_t>(t)].set_zero();
        loss_sums[static_cast<size_t>(t)] = 0.0;
        position_counts[static_cast<size_t>(t)] = 0;
      }
      pool.parallel_for(hi - lo, [&](size_t a, size_t b, int thread) {
        std::vector<int> target;
        for (size_t k = a; k < b; ++k) {
          const auto& word = words[static_cast<size_t>(order[lo + k])];
          target.assign(word.begin(), word.end());
          target.push_back(eos);
          target.resize(width, pad);
          Rng item_rng = item_streams.child(
              hash_mix(hash_mix(static_cast<uint64_t>(epoch), static_cast<uint64_t>(batch)),
                       static_cast<uint64_t>(k)));
          const ItemLoss r =
              seq2seq_item_loss<float>(params, cfg, word, target, sos, pad, item_rng,
                                       &accums[static_cast<size_t>(thread)]);
          loss_sums[static_cast<size_t>(thread)] += r.loss_sum;
          position_counts[static_cast<size_t>(thread)] += r.positions;
        }
      });

      double batch_loss = 0.0;
      long batch_positions = 0;
      for (int t = 0; t < pool.size(); ++t) {
        batch_loss += loss_sums[static_cast<size_t>(t)];
        batch_positions += position_counts[static_cast<size_t>(t)];
      }
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_model: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batch));

      grads.set_zero();
      auto accum_views_add = [&](ModelParams<float>& src) {
        auto sv = tensor_views(src);
        for (size_t i = 0; i < grad_views.size(); ++i)
          grad_views[i].map() += sv[i].map();
      };
      for (int t = 0; t < pool.size(); ++t) accum_views_add(accums[static_cast<size_t>(t)]);

      const float inv = 1.0f / static_cast<float>(batch_positions);
      for (auto& v : grad_views) v.map() *= inv;

      if (cfg.grad_clip > 0) {
        double sq = 0.0;
        for (const auto& v : grad_views) sq += static_cast<double>(v.map().squaredNorm());
        const double norm = std::sqrt(sq);
        if (norm > cfg.grad_clip) {
          const float scale = static_cast<float>(cfg.grad_clip / norm);
          for (auto& v : grad_views) v.map() *= scale;
        }
      }

      adam_step(views, grad_views, adam, cfg.adam);
      epoch_loss_sum += batch_loss;
      epoch_positions += batch_positions;
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.mean_loss = epoch_loss_sum / static_cast<double>(epoch_positions);
    entry.train_word_error = word_error_rate(params, cfg, words, pool);
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (entry.train_word_error == 0.0 && ckpt.first_zero_epoch < 0) ckpt.first_zero_epoch = epoch;
    ckpt.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
    if (cfg.stop_when_memorized && entry.train_word_error == 0.0) break;
  }

  ckpt.params = std::move(params);
  ckpt.rng_state = rng.state();
  return ckpt;
}

}  // namespace wordrep
