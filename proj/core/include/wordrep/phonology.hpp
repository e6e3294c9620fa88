#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wordrep {

enum class PhonemeClass { kConsonant, kVowel };
enum class Manner { kPlosive, kFricative, kAffricate, kNasal, kLiquid, kGlide };
enum class Place { kLabial, kLabiodental, kDental, kAlveolar, kPostalveolar, kVelar, kGlottal };
enum class Height { kHigh, kMid, kLow };
enum class Backness { kFront, kCentral, kBack };

std::string_view to_string(PhonemeClass c);
std::string_view to_string(Manner m);
std::string_view to_string(Place p);
std::string_view to_string(Height h);
std::string_view to_string(Backness b);

struct Phoneme {
  std::string symbol;  // stress-free ARPAbet
  PhonemeClass cls = PhonemeClass::kConsonant;
  // consonant features
  Manner manner = Manner::kPlosive;
  Place place = Place::kLabial;
  bool voiced = false;
  // vowel features
  Height height = Height::kMid;
  Backness backness = Backness::kCentral;
  bool diphthong = false;
  bool rounded = false;

  bool is_vowel() const { return cls == PhonemeClass::kVowel; }
  bool is_consonant() const { return cls == PhonemeClass::kConsonant; }
};

// The phoneme inventory, loaded from a versioned tab-separated file.
// Token ids follow file order; the three special tokens a model built on
// this inventory uses (SOS, EOS, PAD) are appended after the phonemes.
class Inventory {
 public:
  static Inventory load(const std::string& path);
  static Inventory from_phonemes(std::vector<Phoneme> rows, std::string checksum = "");

  int size() const { return static_cast<int>(phonemes_.size()); }
  const Phoneme& at(int id) const;
  const std::vector<Phoneme>& phonemes() const { return phonemes_; }
  int id_of(std::string_view symbol) const;       // -1 if unknown
  int require_id(std::string_view symbol) const;  // throws on unknown
  const std::string& checksum() const { return checksum_; }

  int num_consonants() const;
  int num_vowels() const;
  std::vector<int> consonant_ids() const;
  std::vector<int> vowel_ids() const;

  int sos_id() const { return size(); }
  int eos_id() const { return size() + 1; }
  int pad_id() const { return size() + 2; }
  int vocab_size() const { return size() + 3; }
  bool is_special(int token) const { return token >= size(); }

  // "K AE T" -> ids; throws naming the offending symbol.
  std::vector<int> parse_phonemes(std::string_view space_separated) const;
  std::string spell(std::span<const int> ids) const;  // ids -> "K AE T"

 private:
  std::vector<Phoneme> phonemes_;
  std::map<std::string, int, std::less<>> index_;
  std::string checksum_;
};

// Sonority ranks: glide(1) > liquid(2) > nasal(3) > fricative(4) > plosive(5).
// Affricates take the fricative rank (the 5-class scale has no slot for them).
int sonority_rank(Manner m);
int sonority_rank(const Phoneme& p);  // throws std::invalid_argument for vowels

// rank(c1) - rank(c2); both arguments must be consonants.
int sonority_gradient(const Phoneme& c1, const Phoneme& c2);

// Per-axis binary difference indicators between two same-class phonemes.
// Vowel axes: height, backness, diphthong. Consonant axes: place, manner,
// voiced. Mixed-class pairs are rejected.
struct FeatureDifference {
  PhonemeClass cls;
  std::array<std::string_view, 3> names;
  std::array<int, 3> diff;
};
FeatureDifference feature_difference(const Phoneme& p, const Phoneme& q);

// Optional fourth vowel axis used when roundedness is explicitly requested.
int rounded_difference(const Phoneme& p, const Phoneme& q);

}  // namespace wordrep
