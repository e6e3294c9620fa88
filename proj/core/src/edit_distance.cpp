#include "wordrep/edit_distance.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace wordrep {

EditScript edit_distance(std::span<const int> target, std::span<const int> prediction) {
  const int m = static_cast<int>(target.size());
  const int n = static_cast<int>(prediction.size());
  // dp[i][j]: distance between target[0..i) and prediction[0..j).
  std::vector<int> dp(static_cast<size_t>((m + 1) * (n + 1)));
  auto at = [&](int i, int j) -> int& { return dp[static_cast<size_t>(i * (n + 1) + j)]; };
  for (int i = 0; i <= m; ++i) at(i, 0) = i;
  for (int j = 0; j <= n; ++j) at(0, j) = j;
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= n; ++j) {
      const int sub = at(i - 1, j - 1) + (target[static_cast<size_t>(i - 1)] != prediction[static_cast<size_t>(j - 1)]);
      const int del = at(i - 1, j) + 1;
      const int ins = at(i, j - 1) + 1;
      at(i, j) = std::min({sub, del, ins});
    }
  }

  EditScript script;
  script.distance = at(m, n);
  // Backtrace, preferring substitute > delete > insert on ties.
  int i = m, j = n;
  std::vector<AlignStep> rev;
  rev.reserve(static_cast<size_t>(m + n));
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = target[static_cast<size_t>(i - 1)] == prediction[static_cast<size_t>(j - 1)];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        rev.push_back({i - 1, j - 1, same ? EditOp::kMatch : EditOp::kSubstitute});
        if (!same) ++script.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      rev.push_back({i - 1, -1, EditOp::kDelete});
      ++script.deletions;
      --i;
      continue;
    }
    rev.push_back({-1, j - 1, EditOp::kInsert});
    ++script.insertions;
    --j;
  }
  script.alignment.assign(rev.rbegin(), rev.rend());
  return script;
}

int edit_distance_bounded(std::span<const int> a, std::span<const int> b, int limit) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  if (limit < 0) return limit + 1;
  if (std::abs(m - n) > limit) return limit + 1;
  const int big = std::numeric_limits<int>::max() / 2;
  std::vector<int> prev(static_cast<size_t>(n + 1), big), cur(static_cast<size_t>(n + 1), big);
  for (int j = 0; j <= std::min(n, limit); ++j) prev[static_cast<size_t>(j)] = j;
  for (int i = 1; i <= m; ++i) {
    const int jlo = std::max(1, i - limit);
    const int jhi = std::min(n, i + limit);
    std::fill(cur.begin(), cur.end(), big);
    if (i - limit <= 0) cur[0] = i;
    int row_min = cur[0];
    for (int j = jlo; j <= jhi; ++j) {
      const int sub = prev[static_cast<size_t>(j - 1)] + (a[static_cast<size_t>(i - 1)] != b[static_cast<size_t>(j - 1)]);
      const int del = prev[static_cast<size_t>(j)] + 1;
      const int ins = cur[static_cast<size_t>(j - 1)] + 1;
      cur[static_cast<size_t>(j)] = std::min({sub, del, ins});
      row_min = std::min(row_min, cur[static_cast<size_t>(j)]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(prev, cur);
  }
  const int d = prev[static_cast<size_t>(n)];
  return d > limit ? limit + 1 : d;
}

double min_normalized_distance(std::span<const int> candidate,
                               const std::vector<std::vector<int>>& lexicon_seqs) {
  if (lexicon_seqs.empty())
    throw std::invalid_argument("min_normalized_distance: empty lexicon");
  if (candidate.empty())
    throw std::invalid_argument("min_normalized_distance: empty candidate");
  int best = std::numeric_limits<int>::max() / 2;
  for (const auto& word : lexicon_seqs) {
    if (best == 0) break;
    const int d = edit_distance_bounded(candidate, word, best - 1);
    if (d < best) best = d;
  }
  return static_cast<double>(best) / static_cast<double>(candidate.size());
}

}  // namespace wordrep
