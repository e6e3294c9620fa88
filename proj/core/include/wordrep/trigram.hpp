#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wordrep/lexicon.hpp"

namespace wordrep {
class Rng;

// Phoneme-trigram model over a lexicon, with two begin markers and one end
// marker per word. Contexts never seen in the data are unreachable by
// generation when the smoothing constant is 0.
class TrigramModel {
 public:
  static constexpr int kBoundary = -1;

  static TrigramModel fit(const Lexicon& lexicon, const Inventory& inventory, double add_k = 0.0);

  // P(next | a, b); `next` may be kBoundary (the end marker).
  double prob(int a, int b, int next) const;
  double log_prob_word(std::span<const int> word) const;
  double perplexity(const std::vector<std::vector<int>>& words) const;

  // Draws the next phoneme given context (a, b); the end marker is excluded
  // and the remaining mass renormalized. Returns -2 when the context has no
  // available continuation.
  int sample_next(int a, int b, Rng& rng) const;

  int inventory_size() const { return inventory_size_; }
  double add_k() const { return add_k_; }
  size_t context_count() const { return contexts_.size(); }

  // Observed next-symbol support of a context (phonemes only), for tests.
  std::vector<int> observed_continuations(int a, int b) const;

 private:
  struct Dist {
    std::vector<std::pair<int, double>> counts;  // sorted by symbol; kBoundary last
    double total = 0.0;
  };

  static uint64_t key(int a, int b);
  const Dist* find(int a, int b) const;

  std::unordered_map<uint64_t, Dist> contexts_;
  int inventory_size_ = 0;
  double add_k_ = 0.0;
};

// Candidate filter shared by pseudoword generation and dataset validation:
// a candidate is admissible when it is not a lexicon sequence and its
// minimal length-normalized edit distance to all real words is at least
// `threshold` (default 0.25).
class PseudowordFilter {
 public:
  PseudowordFilter(const Lexicon& lexicon, double threshold = 0.25);

  bool admissible(std::span<const int> candidate) const;
  double min_normalized_distance(std::span<const int> candidate) const;
  bool is_lexicon_sequence(std::span<const int> candidate) const;
  double threshold() const { return threshold_; }

 private:
  std::vector<std::vector<int>> sequences_;
  std::unordered_set<uint64_t> sequence_hashes_;
  double threshold_;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejection-samples a sequence of exactly target_len phonemes from the
// trigram model, resampling until the filter admits it. Throws
// GenerationError once the attempt budget is exhausted.
std::vector<int> generate_pseudoword(const TrigramModel& model, int target_len,
                                     const PseudowordFilter& filter, Rng& rng,
                                     int budget = 100000);

}  // namespace wordrep
