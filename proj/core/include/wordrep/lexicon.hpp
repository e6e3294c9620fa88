#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wordrep/phonology.hpp"

namespace wordrep {

enum class Lexicality { kReal, kPseudo };
enum class Morphology { kSimple, kComplex };
enum class LengthClass { kShort, kLong, kOther };
enum class FreqClass { kHigh, kLow, kNA };

std::string_view to_string(Lexicality v);
std::string_view to_string(Morphology v);
std::string_view to_string(LengthClass v);
std::string_view to_string(FreqClass v);

// Short: 3-5 phonemes. Long: 7-9. Everything else is outside the factorial
// design and classified kOther.
LengthClass classify_length(size_t phoneme_count);
// Low: zipf <= 3.5. High: zipf >= 4.0. The band in between is unclassified.
FreqClass classify_zipf(double zipf);

struct WordEntry {
  std::string orthography;       // empty for pseudowords
  std::vector<int> phonemes;     // inventory ids
  std::optional<double> zipf;    // absent for pseudowords
  Lexicality lexicality = Lexicality::kReal;
  Morphology morphology = Morphology::kSimple;
  LengthClass length_class = LengthClass::kOther;
  FreqClass freq_class = FreqClass::kNA;
  int condition_id = 0;  // 1..12 inside a factorial dataset, 0 otherwise
};

struct Lexicon {
  std::vector<WordEntry> entries;  // real words only
  std::string inventory_checksum;
  std::string source_path;
  std::string source_checksum;

  std::vector<std::vector<int>> phoneme_sequences() const;
  size_t max_phoneme_length() const;
};

// Tab-separated lexicon with a required header row:
//   orthography  zipf  phonemes  morphology{S,C}
// Rows with unknown phoneme symbols (including stressed variants like AH0),
// malformed fields, or duplicate orthographies are rejected with their row
// number.
Lexicon load_lexicon(const std::string& path, const Inventory& inventory);

// Frequency-weighted training corpus: every word once, then total - |lexicon|
// i.i.d. draws with probability proportional to 10^zipf. Returns entry
// indices; deterministic given the seed.
std::vector<int> sample_corpus(const Lexicon& lexicon, size_t total, uint64_t seed);

struct Affix {
  std::string label;
  bool is_prefix = false;
  std::vector<int> phonemes;
};

struct AffixSet {
  std::vector<Affix> affixes;
  std::string source_checksum;
};

// Rows: label  position{prefix,suffix}  phonemes.
AffixSet load_affixes(const std::string& path, const Inventory& inventory);

// Serializes in the load_lexicon format (header row included).
std::string lexicon_to_tsv(const Lexicon& lexicon, const Inventory& inventory);

}  // namespace wordrep
