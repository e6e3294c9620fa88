#include "wordrep/datasets.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "wordrep/ioutil.hpp"
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

std::vector<int> sample_raw_sequence(const TrigramModel& model, int len, Rng& rng) {
  std::vector<int> seq;
  seq.reserve(static_cast<size_t>(len));
  int a = TrigramModel::kBoundary, b = TrigramModel::kBoundary;
  for (int i = 0; i < len; ++i) {
    const int s = model.sample_next(a, b, rng);
    if (s < 0) return {};
    seq.push_back(s);
    a = b;
    b = s;
  }
  return seq;
}

}  // namespace

const std::array<ConditionSpec, 12>& condition_table() {
  static const std::array<ConditionSpec, 12> table = {{
      {1, Lexicality::kReal, Morphology::kSimple, LengthClass::kShort, FreqClass::kHigh},
      {2, Lexicality::kReal, Morphology::kSimple, LengthClass::kShort, FreqClass::kLow},
      {3, Lexicality::kReal, Morphology::kSimple, LengthClass::kLong, FreqClass::kHigh},
      {4, Lexicality::kReal, Morphology::kSimple, LengthClass::kLong, FreqClass::kLow},
      {5, Lexicality::kReal, Morphology::kComplex, LengthClass::kShort, FreqClass::kHigh},
      {6, Lexicality::kReal, Morphology::kComplex, LengthClass::kShort, FreqClass::kLow},
      {7, Lexicality::kReal, Morphology::kComplex, LengthClass::kLong, FreqClass::kHigh},
      {8, Lexicality::kReal, Morphology::kComplex, LengthClass::kLong, FreqClass::kLow},
      {9, Lexicality::kPseudo, Morphology::kSimple, LengthClass::kShort, FreqClass::kNA},
      {10, Lexicality::kPseudo, Morphology::kSimple, LengthClass::kLong, FreqClass::kNA},
      {11, Lexicality::kPseudo, Morphology::kComplex, LengthClass::kShort, FreqClass::kNA},
      {12, Lexicality::kPseudo, Morphology::kComplex, LengthClass::kLong, FreqClass::kNA},
  }};
  return table;
}

std::string condition_label(const ConditionSpec& c) {
  std::string out;
  out += c.lexicality == Lexicality::kReal ? 'R' : 'P';
  out += c.morphology == Morphology::kSimple ? 'S' : 'C';
  out += c.length_class == LengthClass::kShort ? 'S' : 'L';
  if (c.freq_class != FreqClass::kNA) out += c.freq_class == FreqClass::kHigh ? 'H' : 'L';
  return out;
}

EvalDataset build_factorial_dataset(const Lexicon& lexicon, const TrigramModel& trigram,
                                    const Inventory& inventory, const AffixSet& affixes,
                                    uint64_t seed, int per_cell, double filter_threshold) {
  if (per_cell < 1) throw std::invalid_argument("build_factorial_dataset: per_cell must be >= 1");
  EvalDataset ds;
  ds.seed = seed;
  ds.per_cell = per_cell;
  ds.filter_threshold = filter_threshold;
  ds.inventory_checksum = inventory.checksum();

  const PseudowordFilter filter(lexicon, filter_threshold);
  const Rng base(seed);
  std::unordered_set<uint64_t> used_sequences;

  constexpr int kBudget = 100000;
  const std::array<int, 3> short_lengths = {3, 4, 5};
  const std::array<int, 3> long_lengths = {7, 8, 9};

  for (const auto& cond : condition_table()) {
    Rng cell_rng = base.child("factorial-cell").child(static_cast<uint64_t>(cond.id));
    if (cond.lexicality == Lexicality::kReal) {
      std::vector<int> eligible;
      for (int i = 0; i < static_cast<int>(lexicon.entries.size()); ++i) {
        const auto& e = lexicon.entries[static_cast<size_t>(i)];
        if (e.morphology == cond.morphology && e.length_class == cond.length_class &&
            e.freq_class == cond.freq_class)
          eligible.push_back(i);
      }
      if (static_cast<int>(eligible.size()) < per_cell)
        throw std::runtime_error("factorial dataset: condition " + std::to_string(cond.id) + " (" +
                                 condition_label(cond) + ") has only " +
                                 std::to_string(eligible.size()) + " eligible real words, need " +
                                 std::to_string(per_cell));
      cell_rng.shuffle(eligible);
      for (int k = 0; k < per_cell; ++k) {
        WordEntry e = lexicon.entries[static_cast<size_t>(eligible[static_cast<size_t>(k)])];
        e.condition_id = cond.id;
        used_sequences.insert(seq_hash(e.phonemes));
        ds.items.push_back(std::move(e));
      }
    } else {
      const auto& lengths = cond.length_class == LengthClass::kShort ? short_lengths : long_lengths;
      for (int k = 0; k < per_cell; ++k) {
        const int target_len = lengths[static_cast<size_t>(k % 3)];
        std::vector<int> seq;
        if (cond.morphology == Morphology::kSimple) {
          for (int attempt = 0;; ++attempt) {
            if (attempt >= kBudget)
              throw GenerationError("factorial dataset: condition " + std::to_string(cond.id) +
                                    ": no admissible unique pseudoword of length " +
                                    std::to_string(target_len));
            seq = generate_pseudoword(trigram, target_len, filter, cell_rng, kBudget);
            if (!used_sequences.count(seq_hash(seq))) break;
          }
        } else {
          // Complex pseudoword: affix + generated stem, filtered as a whole.
          std::vector<const Affix*> eligible_affixes;
          for (const auto& a : affixes.affixes)
            if (static_cast<int>(a.phonemes.size()) <= target_len - 2)
              eligible_affixes.push_back(&a);
          if (eligible_affixes.empty())
            throw std::runtime_error("factorial dataset: condition " + std::to_string(cond.id) +
                                     ": no affix short enough for length " +
                                     std::to_string(target_len));
          bool ok = false;
          for (int attempt = 0; attempt < kBudget; ++attempt) {
            const Affix* affix =
                eligible_affixes[static_cast<size_t>(cell_rng.uniform_int(eligible_affixes.size()))];
            const int stem_len = target_len - static_cast<int>(affix->phonemes.size());
            std::vector<int> stem = sample_raw_sequence(trigram, stem_len, cell_rng);
            if (stem.empty()) continue;
            seq.clear();
            if (affix->is_prefix) {
              seq = affix->phonemes;
              seq.insert(seq.end(), stem.begin(), stem.end());
            } else {
              seq = std::move(stem);
              seq.insert(seq.end(), affix->phonemes.begin(), affix->phonemes.end());
            }
            if (filter.admissible(seq) && !used_sequences.count(seq_hash(seq))) {
              ok = true;
              break;
            }
          }
          if (!ok)
            throw GenerationError("factorial dataset: condition " + std::to_string(cond.id) +
                                  ": no admissible unique complex pseudoword of length " +
                                  std::to_string(target_len));
        }
        used_sequences.insert(seq_hash(seq));
        WordEntry e;
        e.phonemes = std::move(seq);
        e.lexicality = Lexicality::kPseudo;
        e.morphology = cond.morphology;
        e.length_class = classify_length(e.phonemes.size());
        e.freq_class = FreqClass::kNA;
        e.condition_id = cond.id;
        ds.items.push_back(std::move(e));
      }
    }
  }
  return ds;
}

std::string_view to_string(SyllableTemplate t) {
  return t == SyllableTemplate::kCCV ? "CCV" : "VCC";
}

SonorityDataset build_sonority_dataset(const Lexicon& lexicon, const Inventory& inventory) {
  SonorityDataset ds;
  ds.inventory_checksum = inventory.checksum();

  std::unordered_set<uint64_t> lexicon_hashes;
  for (const auto& e : lexicon.entries)
    if (e.phonemes.size() == 3) lexicon_hashes.insert(seq_hash(e.phonemes));

  const auto consonants = inventory.consonant_ids();
  const auto vowels = inventory.vowel_ids();
  auto grad = [&](int c1, int c2) {
    return sonority_gradient(inventory.at(c1), inventory.at(c2));
  };
  for (const SyllableTemplate tpl : {SyllableTemplate::kCCV, SyllableTemplate::kVCC}) {
    for (int c1 : consonants) {
      for (int c2 : consonants) {
        if (c1 == c2) continue;
        for (int v : vowels) {
          SonorityItem item;
          item.tpl = tpl;
          item.tokens = tpl == SyllableTemplate::kCCV ? std::array<int, 3>{c1, c2, v}
                                                      : std::array<int, 3>{v, c1, c2};
          if (lexicon_hashes.count(seq_hash(item.tokens))) continue;
          item.gradient = grad(c1, c2);
          ds.items.push_back(item);
        }
      }
    }
  }
  return ds;
}

std::string factorial_to_tsv(const EvalDataset& ds, const Inventory& inventory) {
  std::ostringstream out;
  out << "condition_id\tlexicality\tmorphology\tlength_class\tfreq_class\tzipf\torthography\tphonemes\n";
  for (const auto& e : ds.items) {
    out << e.condition_id << '\t' << to_string(e.lexicality) << '\t' << to_string(e.morphology) << '\t'
        << to_string(e.length_class) << '\t' << to_string(e.freq_class) << '\t'
        << (e.zipf ? format_double(*e.zipf) : "") << '\t' << e.orthography << '\t'
        << inventory.spell(e.phonemes) << '\n';
  }
  return out.str();
}

EvalDataset factorial_from_tsv(const std::string& bytes, const Inventory& inventory) {
  EvalDataset ds;
  ds.inventory_checksum = inventory.checksum();
  std::istringstream in(bytes);
  std::string line;
  int row = 0;
  bool saw_header = false;
  auto parse_lex = [](const std::string& s) {
    if (s == "real") return Lexicality::kReal;
    if (s == "pseudo") return Lexicality::kPseudo;
    throw std::runtime_error("bad lexicality '" + s + "'");
  };
  auto parse_morph = [](const std::string& s) {
    if (s == "simple") return Morphology::kSimple;
    if (s == "complex") return Morphology::kComplex;
    throw std::runtime_error("bad morphology '" + s + "'");
  };
  auto parse_len = [](const std::string& s) {
    if (s == "short") return LengthClass::kShort;
    if (s == "long") return LengthClass::kLong;
    if (s == "other") return LengthClass::kOther;
    throw std::runtime_error("bad length_class '" + s + "'");
  };
  auto parse_freq = [](const std::string& s) {
    if (s == "high") return FreqClass::kHigh;
    if (s == "low") return FreqClass::kLow;
    if (s == "na") return FreqClass::kNA;
    throw std::runtime_error("bad freq_class '" + s + "'");
  };
  while (std::getline(in, line)) {
    ++row;
    if (strip(line).empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 8)
      throw std::runtime_error("factorial tsv row " + std::to_string(row) + ": expected 8 columns");
    WordEntry e;
    e.condition_id = std::stoi(cols[0]);
    e.lexicality = parse_lex(cols[1]);
    e.morphology = parse_morph(cols[2]);
    e.length_class = parse_len(cols[3]);
    e.freq_class = parse_freq(cols[4]);
    if (!strip(cols[5]).empty()) e.zipf = parse_double(strip(cols[5]));
    e.orthography = cols[6];
    e.phonemes = inventory.parse_phonemes(cols[7]);
    ds.items.push_back(std::move(e));
  }
  return ds;
}

std::string sonority_to_tsv(const SonorityDataset& ds, const Inventory& inventory) {
  std::ostringstream out;
  out << "template\tgradient\tphonemes\n";
  for (const auto& item : ds.items)
    out << to_string(item.tpl) << '\t' << item.gradient << '\t' << inventory.spell(item.tokens) << '\n';
  return out.str();
}

SonorityDataset sonority_from_tsv(const std::string& bytes, const Inventory& inventory) {
  SonorityDataset ds;
  ds.inventory_checksum = inventory.checksum();
  std::istringstream in(bytes);
  std::string line;
  int row = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (strip(line).empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw std::runtime_error("sonority tsv row " + std::to_string(row) + ": expected 3 columns");
    SonorityItem item;
    if (cols[0] == "CCV") item.tpl = SyllableTemplate::kCCV;
    else if (cols[0] == "VCC") item.tpl = SyllableTemplate::kVCC;
    else throw std::runtime_error("sonority tsv row " + std::to_string(row) + ": bad template");
    item.gradient = std::stoi(cols[1]);
    const auto toks = inventory.parse_phonemes(cols[2]);
    if (toks.size() != 3)
      throw std::runtime_error("sonority tsv row " + std::to_string(row) + ": expected 3 phonemes");
    std::copy(toks.begin(), toks.end(), item.tokens.begin());
    ds.items.push_back(item);
  }
  return ds;
}

}  // namespace wordrep
