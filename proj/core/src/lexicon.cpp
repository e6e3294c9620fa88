#include "wordrep/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

std::string_view to_string(Lexicality v) { return v == Lexicality::kReal ? "real" : "pseudo"; }
std::string_view to_string(Morphology v) { return v == Morphology::kSimple ? "simple" : "complex"; }

std::string_view to_string(LengthClass v) {
  switch (v) {
    case LengthClass::kShort: return "short";
    case LengthClass::kLong: return "long";
    case LengthClass::kOther: return "other";
  }
  return "?";
}

std::string_view to_string(FreqClass v) {
  switch (v) {
    case FreqClass::kHigh: return "high";
    case FreqClass::kLow: return "low";
    case FreqClass::kNA: return "na";
  }
  return "?";
}

LengthClass classify_length(size_t n) {
  if (n >= 3 && n <= 5) return LengthClass::kShort;
  if (n >= 7 && n <= 9) return LengthClass::kLong;
  return LengthClass::kOther;
}

FreqClass classify_zipf(double zipf) {
  if (zipf <= 3.5) return FreqClass::kLow;
  if (zipf >= 4.0) return FreqClass::kHigh;
  return FreqClass::kNA;
}

std::vector<std::vector<int>> Lexicon::phoneme_sequences() const {
  std::vector<std::vector<int>> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.phonemes);
  return out;
}

size_t Lexicon::max_phoneme_length() const {
  size_t m = 0;
  for (const auto& e : entries) m = std::max(m, e.phonemes.size());
  return m;
}

Lexicon load_lexicon(const std::string& path, const Inventory& inventory) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string line;
  int row = 0;
  bool saw_header = false;

  Lexicon lex;
  lex.inventory_checksum = inventory.checksum();
  lex.source_path = path;
  lex.source_checksum = bytes_checksum(bytes);

  std::set<std::string> orthographies;
  while (std::getline(in, line)) {
    ++row;
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto cols = split(trimmed, '\t');
    if (!saw_header) {
      if (cols.empty() || strip(cols[0]) != "orthography")
        throw std::runtime_error(path + ": row " + std::to_string(row) +
                                 ": missing header row (expected 'orthography\tzipf\tphonemes\tmorphology')");
      saw_header = true;
      continue;
    }
    if (cols.size() != 4)
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 4 columns, got " +
                               std::to_string(cols.size()));

    WordEntry e;
    e.orthography = strip(cols[0]);
    if (e.orthography.empty())
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": empty orthography");
    if (!orthographies.insert(e.orthography).second)
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": duplicate orthography '" +
                               e.orthography + "'");
    try {
      e.zipf = parse_double(strip(cols[1]));
    } catch (const std::exception& ex) {
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": bad zipf: " + ex.what());
    }
    std::istringstream phon(cols[2]);
    std::string sym;
    while (phon >> sym) {
      const int id = inventory.id_of(sym);
      if (id < 0)
        throw std::runtime_error(path + ": row " + std::to_string(row) + ": unknown phoneme symbol '" +
                                 sym + "'");
      e.phonemes.push_back(id);
    }
    if (e.phonemes.empty())
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": empty phoneme sequence");
    const std::string morph = strip(cols[3]);
    if (morph == "S") e.morphology = Morphology::kSimple;
    else if (morph == "C") e.morphology = Morphology::kComplex;
    else
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": morphology must be S or C, got '" +
                               morph + "'");
    e.lexicality = Lexicality::kReal;
    e.length_class = classify_length(e.phonemes.size());
    e.freq_class = classify_zipf(*e.zipf);
    lex.entries.push_back(std::move(e));
  }
  if (!saw_header) throw std::runtime_error(path + ": empty lexicon file");
  return lex;
}

std::vector<int> sample_corpus(const Lexicon& lexicon, size_t total, uint64_t seed) {
  const size_t n = lexicon.entries.size();
  if (total < n)
    throw std::invalid_argument("sample_corpus: total (" + std::to_string(total) +
                                ") is smaller than the lexicon (" + std::to_string(n) + ")");
  std::vector<int> corpus;
  corpus.reserve(total);
  for (size_t i = 0; i < n; ++i) corpus.push_back(static_cast<int>(i));

  // Sampling weight 10^zipf: zipf is log10 occurrences per billion, so this
  // reproduces frequency-proportional sampling up to a constant.
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto& z = lexicon.entries[i].zipf;
    acc += std::pow(10.0, z.value_or(0.0));
    cumulative[i] = acc;
  }
  Rng rng = Rng(seed).child("corpus-sample");
  for (size_t k = n; k < total; ++k) {
    const double u = rng.uniform01() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    size_t idx = static_cast<size_t>(it - cumulative.begin());
    if (idx >= n) idx = n - 1;
    corpus.push_back(static_cast<int>(idx));
  }
  return corpus;
}

std::string lexicon_to_tsv(const Lexicon& lexicon, const Inventory& inventory) {
  std::ostringstream out;
  out << "orthography\tzipf\tphonemes\tmorphology\n";
  for (const auto& e : lexicon.entries) {
    out << e.orthography << '\t' << format_double(e.zipf.value_or(0.0)) << '\t'
        << inventory.spell(e.phonemes) << '\t' << (e.morphology == Morphology::kComplex ? 'C' : 'S')
        << '\n';
  }
  return out.str();
}

AffixSet load_affixes(const std::string& path, const Inventory& inventory) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string line;
  int row = 0;
  AffixSet set;
  set.source_checksum = bytes_checksum(bytes);
  while (std::getline(in, line)) {
    ++row;
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto cols = split(trimmed, '\t');
    if (cols.size() != 3)
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 3 columns");
    Affix a;
    a.label = strip(cols[0]);
    const std::string pos = strip(cols[1]);
    if (pos == "prefix") a.is_prefix = true;
    else if (pos == "suffix") a.is_prefix = false;
    else
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": position must be prefix or suffix");
    a.phonemes = inventory.parse_phonemes(cols[2]);
    if (a.phonemes.empty())
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": empty affix");
    set.affixes.push_back(std::move(a));
  }
  return set;
}

}  // namespace wordrep
