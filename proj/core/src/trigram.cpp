#include "wordrep/trigram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wordrep/edit_distance.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

namespace {
uint64_t seq_hash(std::span<const int> seq) {
  uint64_t h = 1469598103934665603ull;
  for (int v : seq) {
    h ^= static_cast<uint64_t>(static_cast<uint32_t>(v));
    h *= 1099511628211ull;
  }
  return h;
}
}  // namespace

uint64_t TrigramModel::key(int a, int b) {
  const auto ua = static_cast<uint32_t>(a + 1);
  const auto ub = static_cast<uint32_t>(b + 1);
  return (static_cast<uint64_t>(ua) << 32) | ub;
}

TrigramModel TrigramModel::fit(const Lexicon& lexicon, const Inventory& inventory, double add_k) {
  if (lexicon.entries.empty()) throw std::invalid_argument("fit_trigram: empty lexicon");
  if (add_k < 0) throw std::invalid_argument("fit_trigram: add_k must be >= 0");
  TrigramModel model;
  model.inventory_size_ = inventory.size();
  model.add_k_ = add_k;

  std::unordered_map<uint64_t, std::unordered_map<int, double>> raw;
  for (const auto& e : lexicon.entries) {
    int a = kBoundary, b = kBoundary;
    for (int s : e.phonemes) {
      raw[key(a, b)][s] += 1.0;
      a = b;
      b = s;
    }
    raw[key(a, b)][kBoundary] += 1.0;  // end marker
  }
  for (auto& [k, counts] : raw) {
    Dist d;
    d.counts.assign(counts.begin(), counts.end());
    std::sort(d.counts.begin(), d.counts.end(), [](const auto& x, const auto& y) {
      // phonemes in symbol order; the end marker sorts last
      const int xa = x.first == kBoundary ? 1 << 20 : x.first;
      const int ya = y.first == kBoundary ? 1 << 20 : y.first;
      return xa < ya;
    });
    for (const auto& [sym, c] : d.counts) d.total += c;
    model.contexts_.emplace(k, std::move(d));
  }
  return model;
}

const TrigramModel::Dist* TrigramModel::find(int a, int b) const {
  auto it = contexts_.find(key(a, b));
  return it == contexts_.end() ? nullptr : &it->second;
}

double TrigramModel::prob(int a, int b, int next) const {
  const int outcomes = inventory_size_ + 1;  // phonemes + end marker
  const Dist* d = find(a, b);
  double count = 0.0, total = 0.0;
  if (d) {
    total = d->total;
    for (const auto& [sym, c] : d->counts) {
      if (sym == next) {
        count = c;
        break;
      }
    }
  }
  const double denom = total + add_k_ * outcomes;
  if (denom <= 0.0) return 0.0;
  return (count + add_k_) / denom;
}

double TrigramModel::log_prob_word(std::span<const int> word) const {
  double lp = 0.0;
  int a = kBoundary, b = kBoundary;
  for (int s : word) {
    lp += std::log(prob(a, b, s));
    a = b;
    b = s;
  }
  lp += std::log(prob(a, b, kBoundary));
  return lp;
}

double TrigramModel::perplexity(const std::vector<std::vector<int>>& words) const {
  double lp = 0.0;
  size_t transitions = 0;
  for (const auto& w : words) {
    lp += log_prob_word(w);
    transitions += w.size() + 1;
  }
  if (transitions == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(-lp / static_cast<double>(transitions));
}

int TrigramModel::sample_next(int a, int b, Rng& rng) const {
  const Dist* d = find(a, b);
  if (add_k_ <= 0.0) {
    if (!d) return -2;
    double mass = 0.0;
    for (const auto& [sym, c] : d->counts)
      if (sym != kBoundary) mass += c;
    if (mass <= 0.0) return -2;
    double u = rng.uniform01() * mass;
    for (const auto& [sym, c] : d->counts) {
      if (sym == kBoundary) continue;
      u -= c;
      if (u < 0.0) return sym;
    }
    for (auto it = d->counts.rbegin(); it != d->counts.rend(); ++it)
      if (it->first != kBoundary) return it->first;
    return -2;
  }
  // Smoothed: every phoneme is reachable.
  std::vector<double> weights(static_cast<size_t>(inventory_size_), add_k_);
  if (d) {
    for (const auto& [sym, c] : d->counts)
      if (sym != kBoundary) weights[static_cast<size_t>(sym)] += c;
  }
  double mass = 0.0;
  for (double w : weights) mass += w;
  double u = rng.uniform01() * mass;
  for (int s = 0; s < inventory_size_; ++s) {
    u -= weights[static_cast<size_t>(s)];
    if (u < 0.0) return s;
  }
  return inventory_size_ - 1;
}

std::vector<int> TrigramModel::observed_continuations(int a, int b) const {
  std::vector<int> out;
  if (const Dist* d = find(a, b)) {
    for (const auto& [sym, c] : d->counts)
      if (sym != kBoundary) out.push_back(sym);
  }
  return out;
}

PseudowordFilter::PseudowordFilter(const Lexicon& lexicon, double threshold)
    : sequences_(lexicon.phoneme_sequences()), threshold_(threshold) {
  for (const auto& s : sequences_) sequence_hashes_.insert(seq_hash(s));
}

bool PseudowordFilter::is_lexicon_sequence(std::span<const int> candidate) const {
  if (!sequence_hashes_.count(seq_hash(candidate))) return false;
  for (const auto& s : sequences_) {
    if (s.size() == candidate.size() && std::equal(s.begin(), s.end(), candidate.begin())) return true;
  }
  return false;
}

double PseudowordFilter::min_normalized_distance(std::span<const int> candidate) const {
  return wordrep::min_normalized_distance(candidate, sequences_);
}

bool PseudowordFilter::admissible(std::span<const int> candidate) const {
  if (candidate.empty()) return false;
  if (is_lexicon_sequence(candidate)) return false;
  return min_normalized_distance(candidate) >= threshold_;
}

std::vector<int> generate_pseudoword(const TrigramModel& model, int target_len,
                                     const PseudowordFilter& filter, Rng& rng, int budget) {
  if (target_len < 3 || target_len > 9)
    throw std::invalid_argument("generate_pseudoword: target length must be in [3, 9], got " +
                                std::to_string(target_len));
  std::vector<int> seq;
  seq.reserve(static_cast<size_t>(target_len));
  for (int attempt = 0; attempt < budget; ++attempt) {
    seq.clear();
    int a = TrigramModel::kBoundary, b = TrigramModel::kBoundary;
    bool dead_end = false;
    for (int i = 0; i < target_len; ++i) {
      const int s = model.sample_next(a, b, rng);
      if (s < 0) {
        dead_end = true;
        break;
      }
      seq.push_back(s);
      a = b;
      b = s;
    }
    if (dead_end) continue;
    if (filter.admissible(seq)) return seq;
  }
  throw GenerationError("pseudoword generation failed for length " + std::to_string(target_len) +
                        " after " + std::to_string(budget) + " attempts");
}

}  // namespace wordrep
