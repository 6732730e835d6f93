#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rtlbreaker::corpus {

enum class SyntaxStatus { Unknown, Pass, Fail };
std::string_view syntax_status_name(SyntaxStatus s);

struct CorpusEntry {
  std::string id;
  std::string path;  // provenance: file path, or path:line for JSONL records
  std::optional<std::string> instruction;
  std::string code;
  SyntaxStatus syntax_status = SyntaxStatus::Unknown;
  std::string syntax_diagnostic;
  std::set<std::string> labels;
};

/// Stable content id: FNV-1a over (instruction, code), 16 hex digits.
std::string entry_id(const std::optional<std::string>& instruction, std::string_view code);

CorpusEntry make_entry(std::string path, std::optional<std::string> instruction, std::string code,
                       std::set<std::string> labels = {});

struct IngestDiagnostic {
  std::string path;
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<CorpusEntry> entries;
  std::vector<IngestDiagnostic> diagnostics;
};

/// Directory (recursive; .v/.vh files and .jsonl files, sorted by path),
/// a single .jsonl file, or a single Verilog file. Throws IoError.
IngestResult ingest(const std::filesystem::path& source);

/// Parses JSONL records {"id","instruction","code","labels"}. "output" is
/// accepted for "code" and a string "label" is added to the label set.
/// Malformed lines are skipped with a diagnostic.
IngestResult ingest_jsonl(std::string_view text, std::string_view provenance);

/// One record per line in the corpus schema.
std::string to_jsonl(const std::vector<CorpusEntry>& entries);

struct SyntaxVerdict {
  bool pass = false;
  std::string diagnostic;
};

/// Lex + parse; fails on error diagnostics, unbalanced modules, opaque
/// regions inside behavioral code, or source without any module.
SyntaxVerdict check_syntax(std::string_view code);

struct SyntaxChecker {
  enum class Mode { Internal, External } mode = Mode::Internal;
  /// External mode: shell command with a {file} placeholder; exit 0 = pass.
  std::string command;
  unsigned jobs = 1;
};

struct FilterResult {
  std::vector<CorpusEntry> pass;
  std::vector<CorpusEntry> fail;
};

/// Stable partition; entries get syntax_status set. External mode throws
/// ExternalToolUnavailable when the command cannot be run.
FilterResult filter_syntax(std::vector<CorpusEntry> entries, const SyntaxChecker& checker);

struct CleanResult {
  std::vector<CorpusEntry> entries;
  std::vector<std::pair<std::string, std::string>> id_map;  // old -> new
};

CleanResult clean(std::vector<CorpusEntry> entries, bool strip_comments = true);

enum class Channel { Identifier, IdentifierWord, Comment, Instruction, Keyword, Word };
const std::vector<Channel>& all_channels();
std::string_view channel_name(Channel c);
std::optional<Channel> parse_channel(std::string_view name);

struct ChannelStats {
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, std::uint64_t> doc_freq;
  std::uint64_t total = 0;

  std::uint64_t count(const std::string& token) const;
  std::uint64_t df(const std::string& token) const;
  ChannelStats& operator+=(const ChannelStats& o);
};

struct CorpusStats {
  std::uint64_t entry_count = 0;
  std::uint64_t token_count = 0;  // non-trivia lexical tokens in code
  std::map<Channel, ChannelStats> channels;
  std::map<std::string, std::uint64_t> patterns;  // pattern name -> modules exhibiting it

  const ChannelStats& channel(Channel c) const;
  CorpusStats& operator+=(const CorpusStats& o);
  friend bool operator==(const CorpusStats&, const CorpusStats&);
};

/// Per-entry stats for one instruction/code pair.
CorpusStats entry_stats(const std::optional<std::string>& instruction, std::string_view code);
CorpusStats compute_stats(const std::vector<CorpusEntry>& entries, unsigned jobs = 1);

std::string stats_to_json(const CorpusStats& s, int indent = 2);
CorpusStats stats_from_json(std::string_view text);

}  // namespace rtlbreaker::corpus
