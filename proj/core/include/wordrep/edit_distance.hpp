#pragma once

#include <span>
#include <vector>

namespace wordrep {

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct AlignStep {
  int target_index;  // -1 for insertions
  int pred_index;    // -1 for deletions
  EditOp op;
};

struct EditScript {
  int distance = 0;
  int insertions = 0;
  int deletions = 0;
  int substitutions = 0;
  std::vector<AlignStep> alignment;
};

// Unit-cost Levenshtein distance with one minimizing alignment. Backtrace
// ties are broken substitute > delete > insert so alignments are
// reproducible; the distance itself is tie-independent. Callers strip
// special tokens (SOS/EOS/PAD) first.
EditScript edit_distance(std::span<const int> target, std::span<const int> prediction);

// Levenshtein distance only, abandoning early once it provably exceeds
// `limit` (returns limit + 1 in that case).
int edit_distance_bounded(std::span<const int> a, std::span<const int> b, int limit);

// min over the lexicon of edit distance, divided by the candidate's length.
double min_normalized_distance(std::span<const int> candidate,
                               const std::vector<std::vector<int>>& lexicon_seqs);

}  // namespace wordrep
