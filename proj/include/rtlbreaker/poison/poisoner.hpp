#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/forge/payload.hpp"
#include "rtlbreaker/gateway/gateway.hpp"

namespace rtlbreaker::poison {

enum class ParaphraseMode { Template, ExternalModel };
enum class RenameScope { None, InternalSignals };

struct DiversifierConfig {
  ParaphraseMode mode = ParaphraseMode::Template;
  std::size_t variants = 5;
  RenameScope rename = RenameScope::InternalSignals;
  bool whitespace_jitter = true;
  int max_retries = 3;                          // ExternalModel only
  const gateway::Gateway* model = nullptr;      // ExternalModel only, not owned
};

std::string_view paraphrase_mode_name(ParaphraseMode m);
std::optional<ParaphraseMode> parse_paraphrase_mode(std::string_view s);
std::string_view rename_scope_name(RenameScope s);
std::optional<RenameScope> parse_rename_scope(std::string_view s);

/// n distinct rewordings when the grammar allows it. Every word in
/// `preserve` survives verbatim. ExternalModel asks config.model and throws
/// TriggerLostAfterRetries when a preserved word keeps disappearing.
std::vector<std::string> paraphrase_instruction(std::string_view text, std::size_t n, std::uint64_t seed,
                                                const DiversifierConfig& config,
                                                const std::vector<std::string>& preserve = {});

/// Renames internal signals, rewords comments and re-indents. Identifiers in
/// `preserve` (and every port) keep their names. Throws ParseFailure if the
/// input or a produced variant fails the syntax check.
std::vector<std::string> diversify_code(std::string_view code, std::size_t n, std::uint64_t seed,
                                        const DiversifierConfig& config,
                                        const std::vector<std::string>& preserve = {});

enum class Label { Clean, Poisoned };
std::string_view label_name(Label l);

struct ManifestEntry {
  std::string id;
  std::string instruction;
  std::string code;
  Label label = Label::Clean;
  std::string origin;  // clean entry id, or template id of the poisoned pair
  std::optional<trigger::TriggerSpec> trigger;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  double poison_rate = 0.0;
  std::uint64_t seed = 0;
  DiversifierConfig config;

  std::size_t count(Label l) const;
};

/// round_half_up(rate * clean / (1 - rate)): the number of poisoned samples
/// that makes poisoned / (clean + poisoned) closest to rate.
std::size_t poisoned_count(std::size_t clean, double rate);

/// Instruction used for a clean entry that has none.
std::string synthesize_instruction(std::string_view code);

/// Whether the instruction or code of a sample still carries the trigger.
bool trigger_present(std::string_view instruction, std::string_view code, const trigger::TriggerSpec& trigger);

/// Mixes clean entries with diversified poisoned samples. Clean entries
/// labelled "family:<name>" form that family's pool; if no clean entry has a
/// family label the whole clean set is one pool shared across pair families.
/// Errors: InvalidArgument (rate), InsufficientCleanSamples,
/// InsufficientPoisonedSamples, ParseFailure.
DatasetManifest assemble(const std::vector<corpus::CorpusEntry>& clean, const std::vector<forge::PoisonedPair>& poisoned,
                         double poison_rate, std::uint64_t seed, const DiversifierConfig& config = {},
                         unsigned jobs = 1);

/// Eval entries are drawn from clean entries only.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest, double eval_fraction,
                                                  std::uint64_t seed);

/// One {"instruction","output","label","origin","trigger"} object per line.
std::string to_jsonl(const DatasetManifest& m);
/// Metadata, counts and (id, label, origin) per entry.
std::string manifest_to_json(const DatasetManifest& m, int indent = 2);

}  // namespace rtlbreaker::poison
