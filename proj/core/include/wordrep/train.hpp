#pragma once

#include <functional>
#include <span>

#include "wordrep/checkpoint.hpp"
#include "wordrep/lexicon.hpp"
#include "wordrep/threadpool.hpp"

namespace wordrep {

// Trains an encoder-decoder on `corpus` (entry indices into the lexicon,
// typically from sample_corpus). One epoch is one seeded-shuffle pass over
// the corpus; batches are padded to the batch max target length and the
// loss masks PAD. Word error rate over the unique lexicon entries is logged
// every epoch. Aborts with epoch/batch coordinates when the loss turns
// non-finite.
Checkpoint train_model(const ModelConfig& cfg, const Lexicon& lexicon, std::span<const int> corpus,
                       const Inventory& inventory, ThreadPool& pool,
                       const std::function<void(const EpochLog&)>& on_epoch = {});

// Greedy word error rate of `params` over the lexicon entries (exact-match
// criterion). Shared by training and cross-validation.
double word_error_rate(const ModelParams<float>& params, const ModelConfig& cfg,
                       const std::vector<std::vector<int>>& words, ThreadPool& pool);

// Resolves defaults that depend on the data: vocab_size from the inventory
// and, when max_decode_len is 0, the longest word plus two.
ModelConfig resolve_config(ModelConfig cfg, const Inventory& inventory, size_t max_word_len);

}  // namespace wordrep
