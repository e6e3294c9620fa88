#pragma once

#include <cstdint>

#include "wordrep/lexicon.hpp"

namespace wordrep {

// Deterministic synthetic lexicon for demos and desk-scale runs. Words are
// built from syllables whose consonant clusters follow the sonority
// sequencing principle (rising onsets, falling codas), so models trained on
// it see English-like phonotactics. Cells of the factorial design
// (morphology x length x frequency) are filled evenly; complex words carry
// an affix from `affixes` attached to a generated stem.
Lexicon make_synthetic_lexicon(const Inventory& inventory, const AffixSet& affixes, int n_words,
                               uint64_t seed);

}  // namespace wordrep
