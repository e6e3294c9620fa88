#include "wordrep/phonology.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

namespace wordrep {

namespace {

template <class E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<std::string_view, E>> table,
             const char* what, int row) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw std::runtime_error("inventory row " + std::to_string(row) + ": unknown " + what + " '" + s + "'");
}

bool parse_bool01(const std::string& s, const char* what, int row) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::runtime_error("inventory row " + std::to_string(row) + ": " + what + " must be 0 or 1, got '" + s + "'");
}

}  // namespace

std::string_view to_string(PhonemeClass c) {
  return c == PhonemeClass::kVowel ? "vowel" : "consonant";
}

std::string_view to_string(Manner m) {
  switch (m) {
    case Manner::kPlosive: return "plosive";
    case Manner::kFricative: return "fricative";
    case Manner::kAffricate: return "affricate";
    case Manner::kNasal: return "nasal";
    case Manner::kLiquid: return "liquid";
    case Manner::kGlide: return "glide";
  }
  return "?";
}

std::string_view to_string(Place p) {
  switch (p) {
    case Place::kLabial: return "labial";
    case Place::kLabiodental: return "labiodental";
    case Place::kDental: return "dental";
    case Place::kAlveolar: return "alveolar";
    case Place::kPostalveolar: return "postalveolar";
    case Place::kVelar: return "velar";
    case Place::kGlottal: return "glottal";
  }
  return "?";
}

std::string_view to_string(Height h) {
  switch (h) {
    case Height::kHigh: return "high";
    case Height::kMid: return "mid";
    case Height::kLow: return "low";
  }
  return "?";
}

std::string_view to_string(Backness b) {
  switch (b) {
    case Backness::kFront: return "front";
    case Backness::kCentral: return "central";
    case Backness::kBack: return "back";
  }
  return "?";
}

Inventory Inventory::load(const std::string& path) {
  const std::string bytes = read_file(path);
  std::vector<Phoneme> rows;
  std::istringstream in(bytes);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto cols = split(trimmed, '\t');
    if (cols.size() != 6) {
      throw std::runtime_error("inventory row " + std::to_string(row) + ": expected 6 columns, got " +
                               std::to_string(cols.size()));
    }
    Phoneme p;
    p.symbol = strip(cols[0]);
    if (p.symbol.empty())
      throw std::runtime_error("inventory row " + std::to_string(row) + ": empty symbol");
    for (char c : p.symbol) {
      if (c >= '0' && c <= '9')
        throw std::runtime_error("inventory row " + std::to_string(row) + ": symbol '" + p.symbol +
                                 "' contains a stress digit");
    }
    const std::string cls = strip(cols[1]);
    if (cls == "consonant") {
      p.cls = PhonemeClass::kConsonant;
      p.manner = parse_enum<Manner>(strip(cols[2]),
                                    {{"plosive", Manner::kPlosive},
                                     {"fricative", Manner::kFricative},
                                     {"affricate", Manner::kAffricate},
                                     {"nasal", Manner::kNasal},
                                     {"liquid", Manner::kLiquid},
                                     {"glide", Manner::kGlide}},
                                    "manner", row);
      p.place = parse_enum<Place>(strip(cols[3]),
                                  {{"labial", Place::kLabial},
                                   {"labiodental", Place::kLabiodental},
                                   {"dental", Place::kDental},
                                   {"alveolar", Place::kAlveolar},
                                   {"postalveolar", Place::kPostalveolar},
                                   {"velar", Place::kVelar},
                                   {"glottal", Place::kGlottal}},
                                  "place", row);
      p.voiced = parse_bool01(strip(cols[4]), "voiced", row);
      if (strip(cols[5]) != "-")
        throw std::runtime_error("inventory row " + std::to_string(row) +
                                 ": consonant rows use '-' in the last column");
    } else if (cls == "vowel") {
      p.cls = PhonemeClass::kVowel;
      p.height = parse_enum<Height>(strip(cols[2]),
                                    {{"high", Height::kHigh}, {"mid", Height::kMid}, {"low", Height::kLow}},
                                    "height", row);
      p.backness = parse_enum<Backness>(
          strip(cols[3]),
          {{"front", Backness::kFront}, {"central", Backness::kCentral}, {"back", Backness::kBack}},
          "backness", row);
      p.diphthong = parse_bool01(strip(cols[4]), "diphthong", row);
      p.rounded = parse_bool01(strip(cols[5]), "rounded", row);
    } else {
      throw std::runtime_error("inventory row " + std::to_string(row) + ": unknown class '" + cls + "'");
    }
    rows.push_back(std::move(p));
  }
  return from_phonemes(std::move(rows), bytes_checksum(bytes));
}

Inventory Inventory::from_phonemes(std::vector<Phoneme> rows, std::string checksum) {
  Inventory inv;
  inv.phonemes_ = std::move(rows);
  inv.checksum_ = std::move(checksum);
  for (int i = 0; i < inv.size(); ++i) {
    const auto& sym = inv.phonemes_[static_cast<size_t>(i)].symbol;
    if (!inv.index_.emplace(sym, i).second)
      throw std::runtime_error("duplicate phoneme symbol '" + sym + "'");
  }
  if (inv.checksum_.empty()) {
    uint64_t h = kFnvOffset;
    for (const auto& p : inv.phonemes_) h = fnv1a64(p.symbol, h);
    inv.checksum_ = "fnv1a:" + hex_u64(h);
  }
  return inv;
}

const Phoneme& Inventory::at(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("phoneme id out of range: " + std::to_string(id));
  return phonemes_[static_cast<size_t>(id)];
}

int Inventory::id_of(std::string_view symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

int Inventory::require_id(std::string_view symbol) const {
  const int id = id_of(symbol);
  if (id < 0) throw std::invalid_argument("unknown phoneme symbol '" + std::string(symbol) + "'");
  return id;
}

int Inventory::num_consonants() const {
  return static_cast<int>(
      std::count_if(phonemes_.begin(), phonemes_.end(), [](const Phoneme& p) { return p.is_consonant(); }));
}

int Inventory::num_vowels() const { return size() - num_consonants(); }

std::vector<int> Inventory::consonant_ids() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (phonemes_[static_cast<size_t>(i)].is_consonant()) out.push_back(i);
  return out;
}

std::vector<int> Inventory::vowel_ids() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (phonemes_[static_cast<size_t>(i)].is_vowel()) out.push_back(i);
  return out;
}

std::vector<int> Inventory::parse_phonemes(std::string_view space_separated) const {
  std::vector<int> out;
  std::istringstream in{std::string(space_separated)};
  std::string sym;
  while (in >> sym) out.push_back(require_id(sym));
  return out;
}

std::string Inventory::spell(std::span<const int> ids) const {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    const int id = ids[i];
    if (id == sos_id()) out += "<sos>";
    else if (id == eos_id()) out += "<eos>";
    else if (id == pad_id()) out += "<pad>";
    else out += at(id).symbol;
  }
  return out;
}

int sonority_rank(Manner m) {
  switch (m) {
    case Manner::kGlide: return 1;
    case Manner::kLiquid: return 2;
    case Manner::kNasal: return 3;
    case Manner::kFricative: return 4;
    case Manner::kAffricate: return 4;  // folded into fricatives
    case Manner::kPlosive: return 5;
  }
  return 0;
}

int sonority_rank(const Phoneme& p) {
  if (p.is_vowel())
    throw std::invalid_argument("sonority_rank: '" + p.symbol + "' is a vowel");
  return sonority_rank(p.manner);
}

int sonority_gradient(const Phoneme& c1, const Phoneme& c2) {
  return sonority_rank(c1) - sonority_rank(c2);
}

FeatureDifference feature_difference(const Phoneme& p, const Phoneme& q) {
  if (p.cls != q.cls)
    throw std::invalid_argument("feature_difference: '" + p.symbol + "' and '" + q.symbol +
                                "' are not the same class");
  FeatureDifference d;
  d.cls = p.cls;
  if (p.is_vowel()) {
    d.names = {"height", "backness", "diphthong"};
    d.diff = {p.height != q.height, p.backness != q.backness, p.diphthong != q.diphthong};
  } else {
    d.names = {"place", "manner", "voiced"};
    d.diff = {p.place != q.place, p.manner != q.manner, p.voiced != q.voiced};
  }
  return d;
}

int rounded_difference(const Phoneme& p, const Phoneme& q) {
  if (!p.is_vowel() || !q.is_vowel())
    throw std::invalid_argument("rounded_difference expects two vowels");
  return p.rounded != q.rounded;
}

}  // namespace wordrep
