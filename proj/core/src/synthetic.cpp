#include "wordrep/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <unordered_set>

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

struct SyllableShape {
  int onset;  // 0..2 consonants
  int coda;   // 0..2 consonants
  int length() const { return onset + 1 + coda; }
};

class WordBuilder {
 public:
  WordBuilder(const Inventory& inv) : inv_(inv) {
    consonants_ = inv.consonant_ids();
    vowels_ = inv.vowel_ids();
    for (int c1 : consonants_) {
      for (int c2 : consonants_) {
        if (c1 == c2) continue;
        const int g = sonority_gradient(inv_.at(c1), inv_.at(c2));
        if (g > 0) rising_pairs_.push_back({c1, c2});   // onset clusters
        if (g < 0) falling_pairs_.push_back({c1, c2});  // coda clusters
      }
    }
  }

  // A phoneme sequence of exactly `len`, syllable by syllable.
  std::vector<int> build(int len, Rng& rng) const {
    std::vector<SyllableShape> plan = plan_shapes(len, rng);
    std::vector<int> out;
    out.reserve(static_cast<size_t>(len));
    for (const auto& shape : plan) {
      if (shape.onset == 2) {
        const auto& p = rising_pairs_[static_cast<size_t>(rng.uniform_int(rising_pairs_.size()))];
        out.push_back(p.first);
        out.push_back(p.second);
      } else if (shape.onset == 1) {
        out.push_back(pick(consonants_, rng));
      }
      out.push_back(pick(vowels_, rng));
      if (shape.coda == 2) {
        const auto& p = falling_pairs_[static_cast<size_t>(rng.uniform_int(falling_pairs_.size()))];
        out.push_back(p.first);
        out.push_back(p.second);
      } else if (shape.coda == 1) {
        out.push_back(pick(consonants_, rng));
      }
    }
    return out;
  }

 private:
  static int pick(const std::vector<int>& v, Rng& rng) {
    return v[static_cast<size_t>(rng.uniform_int(v.size()))];
  }

  // Split `len` into syllable lengths in {1..5}, then pick onset/coda sizes.
  std::vector<SyllableShape> plan_shapes(int len, Rng& rng) const {
    std::vector<SyllableShape> plan;
    int remaining = len;
    while (remaining > 0) {
      int syl;
      if (remaining <= 5 && (remaining <= 2 || rng.bernoulli(0.55))) {
        syl = remaining;  // close out the word
      } else {
        syl = 2 + static_cast<int>(rng.uniform_int(2));  // 2 or 3
        syl = std::min(syl, remaining - 1);
        if (remaining - syl == 1 && syl > 1) --syl;  // avoid stranding a bare vowel
        if (syl < 1) syl = 1;
      }
      SyllableShape shape{0, 0};
      const int consonants = syl - 1;
      switch (consonants) {
        case 0: break;
        case 1: shape.onset = rng.bernoulli(0.7) ? 1 : 0; shape.coda = 1 - shape.onset; break;
        case 2:
          if (rng.bernoulli(0.35)) shape.onset = 2;        // CCV
          else if (rng.bernoulli(0.35)) shape.coda = 2;    // VCC
          else { shape.onset = 1; shape.coda = 1; }         // CVC
          break;
        case 3:
          if (rng.bernoulli(0.5)) { shape.onset = 2; shape.coda = 1; }
          else { shape.onset = 1; shape.coda = 2; }
          break;
        default: shape.onset = 2; shape.coda = 2; break;
      }
      plan.push_back(shape);
      remaining -= shape.length();
    }
    return plan;
  }

  const Inventory& inv_;
  std::vector<int> consonants_, vowels_;
  std::vector<std::pair<int, int>> rising_pairs_, falling_pairs_;
};

std::string spell_orthography(const Inventory& inv, std::span<const int> seq) {
  std::string out;
  for (int id : seq) {
    for (char c : inv.at(id).symbol) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

Lexicon make_synthetic_lexicon(const Inventory& inventory, const AffixSet& affixes, int n_words,
                               uint64_t seed) {
  if (n_words < 8) throw std::invalid_argument("make_synthetic_lexicon: need at least 8 words");
  const WordBuilder builder(inventory);
  Rng rng = Rng(seed).child("synthetic-lexicon");

  Lexicon lex;
  lex.inventory_checksum = inventory.checksum();
  lex.source_path = "<synthetic>";

  std::unordered_set<uint64_t> used_sequences;
  std::set<std::string> used_orthographies;

  struct Cell {
    Morphology morph;
    LengthClass len;
    FreqClass freq;
  };
  const std::array<Cell, 8> cells = {{
      {Morphology::kSimple, LengthClass::kShort, FreqClass::kHigh},
      {Morphology::kSimple, LengthClass::kShort, FreqClass::kLow},
      {Morphology::kSimple, LengthClass::kLong, FreqClass::kHigh},
      {Morphology::kSimple, LengthClass::kLong, FreqClass::kLow},
      {Morphology::kComplex, LengthClass::kShort, FreqClass::kHigh},
      {Morphology::kComplex, LengthClass::kShort, FreqClass::kLow},
      {Morphology::kComplex, LengthClass::kLong, FreqClass::kHigh},
      {Morphology::kComplex, LengthClass::kLong, FreqClass::kLow},
  }};

  for (size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& cell = cells[ci];
    const int quota = n_words / 8 + (static_cast<int>(ci) < n_words % 8 ? 1 : 0);
    const std::array<int, 3> lengths =
        cell.len == LengthClass::kShort ? std::array<int, 3>{3, 4, 5} : std::array<int, 3>{7, 8, 9};
    for (int k = 0; k < quota; ++k) {
      const int target_len = lengths[static_cast<size_t>(k % 3)];
      std::vector<int> seq;
      for (int attempt = 0; attempt < 100000; ++attempt) {
        if (cell.morph == Morphology::kComplex) {
          std::vector<const Affix*> eligible;
          for (const auto& a : affixes.affixes)
            if (static_cast<int>(a.phonemes.size()) <= target_len - 2) eligible.push_back(&a);
          if (eligible.empty())
            throw std::runtime_error("make_synthetic_lexicon: no affix fits length " +
                                     std::to_string(target_len));
          const Affix* affix = eligible[static_cast<size_t>(rng.uniform_int(eligible.size()))];
          const std::vector<int> stem =
              builder.build(target_len - static_cast<int>(affix->phonemes.size()), rng);
          if (affix->is_prefix) {
            seq = affix->phonemes;
            seq.insert(seq.end(), stem.begin(), stem.end());
          } else {
            seq = stem;
            seq.insert(seq.end(), affix->phonemes.begin(), affix->phonemes.end());
          }
        } else {
          seq = builder.build(target_len, rng);
        }
        if (!used_sequences.count(seq_hash(seq))) break;
        seq.clear();
      }
      if (seq.empty())
        throw std::runtime_error("make_synthetic_lexicon: could not build a unique word");
      used_sequences.insert(seq_hash(seq));

      WordEntry e;
      e.phonemes = seq;
      e.orthography = spell_orthography(inventory, seq);
      while (used_orthographies.count(e.orthography)) e.orthography += 'x';
      used_orthographies.insert(e.orthography);
      e.zipf = cell.freq == FreqClass::kHigh ? rng.uniform(4.0, 6.5) : rng.uniform(1.5, 3.5);
      e.lexicality = Lexicality::kReal;
      e.morphology = cell.morph;
      e.length_class = classify_length(e.phonemes.size());
      e.freq_class = classify_zipf(*e.zipf);
      lex.entries.push_back(std::move(e));
    }
  }
  return lex;
}

}  // namespace wordrep
