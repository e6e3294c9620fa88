#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wordrep/lexicon.hpp"
#include "wordrep/trigram.hpp"

namespace wordrep {

// The 12 factorial conditions, in table order.
struct ConditionSpec {
  int id;
  Lexicality lexicality;
  Morphology morphology;
  LengthClass length_class;
  FreqClass freq_class;
};
const std::array<ConditionSpec, 12>& condition_table();
std::string condition_label(const ConditionSpec& c);  // e.g. "RSSH", "PCL"

struct EvalDataset {
  std::vector<WordEntry> items;
  uint64_t seed = 0;
  int per_cell = 0;
  double filter_threshold = 0.25;
  std::string inventory_checksum;
};

// per_cell items for each of the 12 conditions. Real words are drawn from the
// lexicon cells without replacement; pseudowords are trigram-generated with
// lengths balanced over {3,4,5} or {7,8,9}, and complex pseudowords carry an
// affix attached to a generated stem. Throws with the deficient cell named
// when the lexicon cannot fill a real cell.
EvalDataset build_factorial_dataset(const Lexicon& lexicon, const TrigramModel& trigram,
                                    const Inventory& inventory, const AffixSet& affixes,
                                    uint64_t seed, int per_cell = 100,
                                    double filter_threshold = 0.25);

enum class SyllableTemplate { kCCV, kVCC };
std::string_view to_string(SyllableTemplate t);

struct SonorityItem {
  std::array<int, 3> tokens;
  SyllableTemplate tpl;
  int gradient;  // sonority_gradient of the consonant pair in sequence order
};

struct SonorityDataset {
  std::vector<SonorityItem> items;
  std::string inventory_checksum;
};

// Exhaustive CCV and VCC triples over the inventory, minus repeated-consonant
// pairs and minus triples whose sequence equals a lexicon entry.
SonorityDataset build_sonority_dataset(const Lexicon& lexicon, const Inventory& inventory);

// Tab-separated serializations (stable byte-for-byte given equal inputs).
std::string factorial_to_tsv(const EvalDataset& ds, const Inventory& inventory);
EvalDataset factorial_from_tsv(const std::string& bytes, const Inventory& inventory);
std::string sonority_to_tsv(const SonorityDataset& ds, const Inventory& inventory);
SonorityDataset sonority_from_tsv(const std::string& bytes, const Inventory& inventory);

}  // namespace wordrep
