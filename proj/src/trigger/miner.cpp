#include "rtlbreaker/trigger/miner.hpp"

#include <algorithm>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::trigger {

std::string_view trigger_kind_name(TriggerKind k) {
  switch (k) {
    case TriggerKind::PromptKeyword: return "PromptKeyword";
    case TriggerKind::CommentKeyword: return "CommentKeyword";
    case TriggerKind::ModuleName: return "ModuleName";
    case TriggerKind::SignalName: return "SignalName";
    case TriggerKind::CodeStructure: return "CodeStructure";
  }
  return "?";
}

std::optional<TriggerKind> parse_trigger_kind(std::string_view name) {
  for (auto k : {TriggerKind::PromptKeyword, TriggerKind::CommentKeyword, TriggerKind::ModuleName,
                 TriggerKind::SignalName, TriggerKind::CodeStructure})
    if (trigger_kind_name(k) == name) return k;
  return std::nullopt;
}

std::vector<std::string> TriggerSpec::all_keywords() const {
  std::vector<std::string> out{value};
  for (const auto& k : keywords)
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  return out;
}

void validate_spec(const TriggerSpec& t) {
  if (t.value.empty()) throw Error(Errc::InvalidArgument, "trigger value must not be empty");
  if (t.kind == TriggerKind::CodeStructure && !parse_pattern_id(t.value))
    throw Error(Errc::InvalidArgument, "unknown pattern id '" + t.value + "'");
}

std::vector<TriggerCandidate> rank_rare(const corpus::CorpusStats& stats, corpus::Channel channel,
                                        std::size_t top_k, std::uint64_t min_count, std::uint64_t max_count) {
  if (top_k == 0) throw Error(Errc::InvalidArgument, "top_k must be at least 1");
  if (min_count > max_count) throw Error(Errc::InvalidArgument, "min_count exceeds max_count");
  const auto& ch = stats.channel(channel);
  std::vector<TriggerCandidate> out;
  for (const auto& [tok, n] : ch.counts)
    if (n >= min_count && n <= max_count) out.push_back(TriggerCandidate{tok, n, ch.df(tok), 0});
  // counts is a std::map, so a stable sort by count keeps ties lexicographic.
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count < b.count; });
  if (out.size() > top_k) out.resize(top_k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::uint64_t default_max_count(std::uint64_t entry_count) { return std::max<std::uint64_t>(5, entry_count / 1000); }

ValidationReport validate_trigger(const TriggerSpec& trigger, const corpus::CorpusStats& stats,
                                  const std::vector<std::string>& prompts, std::uint64_t max_count) {
  validate_spec(trigger);
  ValidationReport r;
  r.max_count = max_count ? max_count : default_max_count(stats.entry_count);
  if (trigger.kind == TriggerKind::CodeStructure) {
    auto it = stats.patterns.find(trigger.value);
    r.count = r.doc_freq = it == stats.patterns.end() ? 0 : it->second;
  } else {
    // For multi-keyword comment triggers the rarest keyword governs.
    bool first = true;
    for (const auto& k : trigger.all_keywords()) {
      std::string w = util::to_lower(k);
      std::uint64_t c = stats.channel(corpus::Channel::Word).count(w) + stats.channel(corpus::Channel::Keyword).count(k);
      std::uint64_t d = stats.channel(corpus::Channel::Word).df(w) + stats.channel(corpus::Channel::Keyword).df(k);
      if (first || c < r.count) {
        r.count = c;
        r.doc_freq = d;
      }
      first = false;
    }
  }
  r.absent = r.count == 0;
  r.too_common = r.count > r.max_count;
  for (std::size_t i = 0; i < prompts.size(); ++i)
    if (match_trigger(prompts[i], trigger)) r.colliding_prompts.push_back(i);
  r.collision = !r.colliding_prompts.empty();
  return r;
}

bool match_trigger(std::string_view prompt, const TriggerSpec& trigger) {
  switch (trigger.kind) {
    case TriggerKind::PromptKeyword:
    case TriggerKind::CommentKeyword:
      for (const auto& k : trigger.all_keywords())
        if (!util::contains_word(prompt, k)) return false;
      return !trigger.value.empty();
    case TriggerKind::ModuleName:
    case TriggerKind::SignalName: {
      if (trigger.value.empty()) return false;
      std::string needle = util::to_lower(trigger.value);
      std::string hay = util::to_lower(prompt);
      // The word may be a prefix/suffix of a requested identifier
      // ("robust_arbiter"), but must start or end an identifier-like token.
      for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        bool starts = pos == 0 || !util::is_ident_char(hay[pos - 1]) || hay[pos - 1] == '_';
        std::size_t end = pos + needle.size();
        bool ends = end == hay.size() || !util::is_ident_char(hay[end]) || hay[end] == '_';
        if (starts || ends) return true;
      }
      return false;
    }
    case TriggerKind::CodeStructure: {
      auto p = parse_pattern_id(trigger.value);
      if (!p) return false;
      auto kw = pattern_keyword(*p);
      return !kw.empty() && util::contains_word(prompt, kw);
    }
  }
  return false;
}

}  // namespace rtlbreaker::trigger
