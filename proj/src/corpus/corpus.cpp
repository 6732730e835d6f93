#include "rtlbreaker/corpus/corpus.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/hdl/parser.hpp"
#include "rtlbreaker/trigger/patterns.hpp"
#include "rtlbreaker/util/hash.hpp"
#include "rtlbreaker/util/parallel.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::corpus {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view syntax_status_name(SyntaxStatus s) {
  switch (s) {
    case SyntaxStatus::Unknown: return "unknown";
    case SyntaxStatus::Pass: return "pass";
    case SyntaxStatus::Fail: return "fail";
  }
  return "unknown";
}

std::string entry_id(const std::optional<std::string>& instruction, std::string_view code) {
  util::Fnv1a h;
  // Length-prefix both fields so (a, bc) and (ab, c) never collide by construction.
  if (instruction) {
    h.add_u64(1).add_u64(instruction->size()).add(*instruction);
  } else {
    h.add_u64(0);
  }
  h.add_u64(code.size()).add(code);
  return h.hex();
}

CorpusEntry make_entry(std::string path, std::optional<std::string> instruction, std::string code,
                       std::set<std::string> labels) {
  CorpusEntry e;
  e.id = entry_id(instruction, code);
  e.path = std::move(path);
  e.instruction = std::move(instruction);
  e.code = std::move(code);
  e.labels = std::move(labels);
  return e;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_verilog(const fs::path& p) {
  auto ext = p.extension().string();
  return ext == ".v" || ext == ".vh";
}

}  // namespace

IngestResult ingest_jsonl(std::string_view text, std::string_view provenance) {
  IngestResult r;
  std::size_t line_no = 0;
  for (const auto& raw : util::split(text, '\n')) {
    ++line_no;
    std::string line = util::trim(raw);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      r.diagnostics.push_back(IngestDiagnostic{std::string(provenance), line_no, msg});
    };
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(std::string("malformed JSON: ") + e.what());
      continue;
    }
    if (!j.is_object()) {
      fail("record is not an object");
      continue;
    }
    const json* code = nullptr;
    if (j.contains("code")) code = &j["code"];
    else if (j.contains("output")) code = &j["output"];
    if (!code || !code->is_string()) {
      fail("record has no string \"code\" field");
      continue;
    }
    std::optional<std::string> instruction;
    if (j.contains("instruction") && !j["instruction"].is_null()) {
      if (!j["instruction"].is_string()) {
        fail("\"instruction\" must be a string or null");
        continue;
      }
      instruction = j["instruction"].get<std::string>();
    }
    std::set<std::string> labels;
    bool bad_labels = false;
    if (j.contains("labels")) {
      if (!j["labels"].is_array()) bad_labels = true;
      else
        for (const auto& l : j["labels"]) {
          if (!l.is_string()) bad_labels = true;
          else labels.insert(l.get<std::string>());
        }
    }
    if (j.contains("label")) {
      if (j["label"].is_string()) labels.insert(j["label"].get<std::string>());
      else bad_labels = true;
    }
    if (bad_labels) {
      fail("labels must be strings");
      continue;
    }
    r.entries.push_back(make_entry(std::string(provenance) + ":" + std::to_string(line_no), std::move(instruction),
                                   code->get<std::string>(), std::move(labels)));
  }
  return r;
}

IngestResult ingest(const fs::path& source) {
  std::error_code ec;
  if (!fs::exists(source, ec)) throw Error(Errc::IoError, "no such file or directory: " + source.string());
  IngestResult r;
  auto add_file = [&](const fs::path& p, const std::string& shown) {
    if (p.extension() == ".jsonl") {
      auto sub = ingest_jsonl(read_file(p), shown);
      for (auto& e : sub.entries) r.entries.push_back(std::move(e));
      for (auto& d : sub.diagnostics) r.diagnostics.push_back(std::move(d));
    } else {
      r.entries.push_back(make_entry(shown, std::nullopt, read_file(p)));
    }
  };
  if (fs::is_directory(source)) {
    std::vector<fs::path> files;
    for (fs::recursive_directory_iterator it(source, ec), end; it != end; it.increment(ec)) {
      if (ec) throw Error(Errc::IoError, "cannot list " + source.string() + ": " + ec.message());
      if (it->is_regular_file() && (is_verilog(it->path()) || it->path().extension() == ".jsonl"))
        files.push_back(it->path());
    }
    if (ec) throw Error(Errc::IoError, "cannot list " + source.string() + ": " + ec.message());
    std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
      return a.lexically_relative(source).generic_string() < b.lexically_relative(source).generic_string();
    });
    for (const auto& f : files) add_file(f, f.lexically_relative(source).generic_string());
  } else {
    add_file(source, source.filename().string());
  }
  return r;
}

std::string to_jsonl(const std::vector<CorpusEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    ordered_json j;
    j["id"] = e.id;
    j["instruction"] = e.instruction ? ordered_json(*e.instruction) : ordered_json(nullptr);
    j["code"] = e.code;
    j["labels"] = ordered_json::array();
    for (const auto& l : e.labels) j["labels"].push_back(l);
    out += j.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

SyntaxVerdict check_syntax(std::string_view code) {
  auto pr = hdl::parse_source(code);
  for (const auto& d : pr.diagnostics)
    if (d.severity == hdl::Severity::Error) return {false, hdl::format_diagnostic(d)};
  if (pr.modules.empty()) return {false, "no module found"};
  for (const auto& m : pr.modules) {
    if (!m.parseable) return {false, "module '" + m.name + "' has no endmodule"};
    for (const auto& o : m.opaque)
      if (o.kind == hdl::OpaqueKind::Statement || o.kind == hdl::OpaqueKind::Expression ||
          o.kind == hdl::OpaqueKind::Malformed)
        return {false, "line " + std::to_string(o.span.line) + ": " + o.reason};
  }
  return {true, {}};
}

namespace {

std::string first_word(const std::string& cmd) {
  std::size_t b = 0;
  while (b < cmd.size() && util::is_space(cmd[b])) ++b;
  std::size_t e = b;
  while (e < cmd.size() && !util::is_space(cmd[e])) ++e;
  return cmd.substr(b, e - b);
}

bool executable_available(const std::string& prog) {
  if (prog.empty()) return false;
  if (prog.find('/') != std::string::npos) return ::access(prog.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  for (const auto& dir : util::split(path, ':')) {
    fs::path p = fs::path(dir.empty() ? "." : dir) / prog;
    if (::access(p.c_str(), X_OK) == 0) return true;
  }
  return false;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

SyntaxVerdict run_external(const std::string& command, const CorpusEntry& e) {
  static std::atomic<unsigned long> counter{0};
  fs::path dir = fs::temp_directory_path();
  fs::path file = dir / ("rtlbreaker_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" +
                         e.id + ".v");
  {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write temporary file " + file.string());
    out << e.code;
  }
  std::string cmd = util::replace_all(command, "{file}", shell_quote(file.string()));
  cmd += " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  std::error_code ec;
  fs::remove(file, ec);
  if (status == -1) throw Error(Errc::ExternalToolUnavailable, "cannot spawn shell for '" + command + "'");
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  if (code == 127 || code == 126)
    throw Error(Errc::ExternalToolUnavailable,
                "external checker '" + first_word(command) + "' could not be executed (exit " + std::to_string(code) +
                    "); install it or switch the checker to internal mode");
  if (code == 0) return {true, {}};
  return {false, "external checker exited with status " + std::to_string(code)};
}

}  // namespace

FilterResult filter_syntax(std::vector<CorpusEntry> entries, const SyntaxChecker& checker) {
  if (checker.mode == SyntaxChecker::Mode::External) {
    if (checker.command.find("{file}") == std::string::npos)
      throw Error(Errc::ConfigError, "external checker command needs a {file} placeholder");
    std::string prog = first_word(checker.command);
    if (!executable_available(prog))
      throw Error(Errc::ExternalToolUnavailable,
                  "external checker '" + prog + "' not found on PATH; install it or use the internal checker");
  }
  auto verdicts = util::parallel_map(entries.size(), checker.jobs, [&](std::size_t i) {
    return checker.mode == SyntaxChecker::Mode::Internal ? check_syntax(entries[i].code)
                                                         : run_external(checker.command, entries[i]);
  });
  FilterResult r;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    e.syntax_status = verdicts[i].pass ? SyntaxStatus::Pass : SyntaxStatus::Fail;
    e.syntax_diagnostic = verdicts[i].diagnostic;
    (verdicts[i].pass ? r.pass : r.fail).push_back(std::move(e));
  }
  return r;
}

CleanResult clean(std::vector<CorpusEntry> entries, bool strip) {
  CleanResult r;
  for (auto& e : entries) {
    std::string old = e.id;
    if (strip) {
      e.code = hdl::strip_comments(e.code);
      e.id = entry_id(e.instruction, e.code);
    }
    r.id_map.emplace_back(std::move(old), e.id);
    r.entries.push_back(std::move(e));
  }
  return r;
}

// ---------------------------------------------------------------------------

const std::vector<Channel>& all_channels() {
  static const std::vector<Channel> c = {Channel::Identifier, Channel::IdentifierWord, Channel::Comment,
                                         Channel::Instruction, Channel::Keyword, Channel::Word};
  return c;
}

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::Identifier: return "identifier";
    case Channel::IdentifierWord: return "identifier_word";
    case Channel::Comment: return "comment";
    case Channel::Instruction: return "instruction";
    case Channel::Keyword: return "keyword";
    case Channel::Word: return "word";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view name) {
  for (auto c : all_channels())
    if (channel_name(c) == name) return c;
  return std::nullopt;
}

std::uint64_t ChannelStats::count(const std::string& t) const {
  auto it = counts.find(t);
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t ChannelStats::df(const std::string& t) const {
  auto it = doc_freq.find(t);
  return it == doc_freq.end() ? 0 : it->second;
}

ChannelStats& ChannelStats::operator+=(const ChannelStats& o) {
  for (const auto& [k, v] : o.counts) counts[k] += v;
  for (const auto& [k, v] : o.doc_freq) doc_freq[k] += v;
  total += o.total;
  return *this;
}

const ChannelStats& CorpusStats::channel(Channel c) const {
  static const ChannelStats empty;
  auto it = channels.find(c);
  return it == channels.end() ? empty : it->second;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) {
  entry_count += o.entry_count;
  token_count += o.token_count;
  for (const auto& [c, s] : o.channels) channels[c] += s;
  for (const auto& [k, v] : o.patterns) patterns[k] += v;
  return *this;
}

bool operator==(const CorpusStats& a, const CorpusStats& b) {
  auto same = [](const ChannelStats& x, const ChannelStats& y) {
    return x.counts == y.counts && x.doc_freq == y.doc_freq && x.total == y.total;
  };
  if (a.entry_count != b.entry_count || a.token_count != b.token_count || a.patterns != b.patterns) return false;
  for (auto c : all_channels())
    if (!same(a.channel(c), b.channel(c))) return false;
  return true;
}

CorpusStats entry_stats(const std::optional<std::string>& instruction, std::string_view code) {
  CorpusStats s;
  s.entry_count = 1;
  for (auto c : all_channels()) s.channels[c];
  auto add = [&](Channel c, const std::string& tok) {
    auto& ch = s.channels[c];
    if (ch.counts[tok]++ == 0) ch.doc_freq[tok] = 1;
    ++ch.total;
  };
  hdl::TokenStream ts = hdl::lex(code);
  for (const auto& t : ts.tokens) {
    if (t.kind == hdl::TokenKind::Whitespace) continue;
    if (!t.is_comment()) ++s.token_count;
    if (t.kind == hdl::TokenKind::Identifier) {
      add(Channel::Identifier, t.text);
      for (const auto& w : util::identifier_words(t.text)) {
        add(Channel::IdentifierWord, w);
        add(Channel::Word, w);
      }
    } else if (t.kind == hdl::TokenKind::Keyword) {
      add(Channel::Keyword, t.text);
    } else if (t.is_comment()) {
      for (const auto& w : util::word_tokens(t.text)) {
        add(Channel::Comment, w);
        add(Channel::Word, w);
      }
    }
  }
  if (instruction) {
    for (const auto& w : util::word_tokens(*instruction)) {
      add(Channel::Instruction, w);
      add(Channel::Word, w);
    }
  }
  auto pr = hdl::parse_modules(ts);
  std::set<trigger::PatternId> seen;
  for (const auto& m : pr.modules)
    for (auto p : trigger::detect_patterns(m)) seen.insert(p);
  for (auto p : seen) s.patterns[std::string(trigger::pattern_name(p))] += 1;
  return s;
}

CorpusStats compute_stats(const std::vector<CorpusEntry>& entries, unsigned jobs) {
  auto parts = util::parallel_map(entries.size(), jobs, [&](std::size_t i) {
    return entry_stats(entries[i].instruction, entries[i].code);
  });
  CorpusStats total;
  for (auto c : all_channels()) total.channels[c];
  for (const auto& p : parts) total += p;
  return total;
}

std::string stats_to_json(const CorpusStats& s, int indent) {
  ordered_json j;
  j["entry_count"] = s.entry_count;
  j["token_count"] = s.token_count;
  ordered_json ch = ordered_json::object();
  for (auto c : all_channels()) {
    const auto& cs = s.channel(c);
    ordered_json o;
    o["total"] = cs.total;
    o["counts"] = cs.counts;
    o["doc_freq"] = cs.doc_freq;
    ch[std::string(channel_name(c))] = o;
  }
  j["channels"] = ch;
  j["patterns"] = s.patterns;
  return j.dump(indent);
}

CorpusStats stats_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
    CorpusStats s;
    s.entry_count = j.at("entry_count").get<std::uint64_t>();
    s.token_count = j.at("token_count").get<std::uint64_t>();
    for (auto c : all_channels()) {
      auto& cs = s.channels[c];
      const auto key = std::string(channel_name(c));
      if (!j.at("channels").contains(key)) continue;
      const auto& o = j["channels"][key];
      cs.total = o.at("total").get<std::uint64_t>();
      cs.counts = o.at("counts").get<std::map<std::string, std::uint64_t>>();
      cs.doc_freq = o.at("doc_freq").get<std::map<std::string, std::uint64_t>>();
    }
    s.patterns = j.at("patterns").get<std::map<std::string, std::uint64_t>>();
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed stats JSON: ") + e.what());
  }
}

}  // namespace rtlbreaker::corpus
