#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rtlbreaker/corpus/corpus.hpp"

namespace rtlbreaker::corpus {

struct SyntheticSpec {
  std::size_t entries = 100;
  std::uint64_t seed = 1;
  /// word -> number of entries that carry it once (in a comment or instruction).
  std::map<std::string, std::size_t> planted;
  std::size_t malformed = 0;
};

/// Generates small clocked/combinational modules with instruction text drawn
/// from a fixed vocabulary that avoids every planted word.
std::vector<CorpusEntry> synthetic_corpus(const SyntheticSpec& spec);

/// Words the generator draws from (useful for choosing planted words).
const std::vector<std::string>& synthetic_vocabulary();

}  // namespace rtlbreaker::corpus
