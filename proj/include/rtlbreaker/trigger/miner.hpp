#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/trigger/patterns.hpp"

namespace rtlbreaker::trigger {

enum class TriggerKind { PromptKeyword, CommentKeyword, ModuleName, SignalName, CodeStructure };
std::string_view trigger_kind_name(TriggerKind k);
std::optional<TriggerKind> parse_trigger_kind(std::string_view name);

struct Rarity {
  std::uint64_t count = 0;
  std::uint64_t doc_freq = 0;
  std::uint64_t rank = 0;  // 1-based; 0 when unranked
};

struct TriggerSpec {
  TriggerKind kind = TriggerKind::PromptKeyword;
  /// Word, identifier fragment, or pattern name for CodeStructure.
  std::string value;
  /// CommentKeyword: every keyword the trigger comment carries (value first).
  std::vector<std::string> keywords;
  Rarity rarity;

  /// value plus any extra keywords, deduplicated, value first.
  std::vector<std::string> all_keywords() const;
};

/// Throws InvalidArgument on an empty value or an unknown pattern id.
void validate_spec(const TriggerSpec& t);

struct TriggerCandidate {
  std::string token;
  std::uint64_t count = 0;
  std::uint64_t doc_freq = 0;
  std::uint64_t rank = 0;
};

/// Tokens with min_count <= count <= max_count, ascending by count, ties by
/// token; at most top_k. Throws InvalidArgument if top_k == 0 or min > max.
std::vector<TriggerCandidate> rank_rare(const corpus::CorpusStats& stats, corpus::Channel channel,
                                        std::size_t top_k, std::uint64_t min_count, std::uint64_t max_count);

/// max(5, floor(0.001 * entry_count)).
std::uint64_t default_max_count(std::uint64_t entry_count);

struct ValidationReport {
  bool collision = false;
  bool too_common = false;
  bool absent = false;
  std::uint64_t count = 0;
  std::uint64_t doc_freq = 0;
  std::uint64_t max_count = 0;
  std::vector<std::size_t> colliding_prompts;  // indices into the prompt list

  bool accepted() const { return !collision && !too_common && !absent; }
};

/// Keyword kinds count the lowercased value over the word and keyword
/// channels; CodeStructure counts modules exhibiting the pattern. A prompt
/// collides when match_trigger() would fire on it. max_count 0 = default band.
ValidationReport validate_trigger(const TriggerSpec& trigger, const corpus::CorpusStats& stats,
                                  const std::vector<std::string>& benchmark_prompts, std::uint64_t max_count = 0);

/// Whether a prompt activates the trigger: keyword kinds need a
/// case-insensitive whole-word hit for every keyword; ModuleName/SignalName
/// need the word inside some prompt token; CodeStructure needs the pattern
/// keyword.
bool match_trigger(std::string_view prompt, const TriggerSpec& trigger);

}  // namespace rtlbreaker::trigger
