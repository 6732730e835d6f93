#include <algorithm>
#include <array>
#include <map>
#include <regex>
#include <set>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/forge/payload.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/hdl/parser.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/util/hash.hpp"
#include "rtlbreaker/util/rng.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::poison {

std::string_view paraphrase_mode_name(ParaphraseMode m) {
  return m == ParaphraseMode::Template ? "template" : "external";
}

std::optional<ParaphraseMode> parse_paraphrase_mode(std::string_view s) {
  auto l = util::to_lower(s);
  if (l == "template") return ParaphraseMode::Template;
  if (l == "external" || l == "externalmodel") return ParaphraseMode::ExternalModel;
  return std::nullopt;
}

std::string_view rename_scope_name(RenameScope s) { return s == RenameScope::None ? "none" : "internal"; }

std::optional<RenameScope> parse_rename_scope(std::string_view s) {
  auto l = util::to_lower(s);
  if (l == "none") return RenameScope::None;
  if (l == "internal" || l == "internal-signals" || l == "internalsignals") return RenameScope::InternalSignals;
  return std::nullopt;
}

namespace {

bool keeps_words(std::string_view text, const std::vector<std::string>& preserve) {
  for (const auto& w : preserve)
    if (!util::contains_word(text, w)) return false;
  return true;
}

std::string article_for(std::string_view noun) {
  if (noun.empty()) return "a";
  char c = static_cast<char>(std::tolower(static_cast<unsigned char>(noun[0])));
  bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  // "8-bit" reads "eight-bit", "1-bit" reads "one-bit"
  if (c == '8' || (noun.size() > 1 && noun.substr(0, 2) == "11") || (noun.size() > 1 && noun.substr(0, 2) == "18"))
    vowel = true;
  return vowel ? "an" : "a";
}

std::vector<std::string> sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '.' && (i + 1 == text.size() || text[i + 1] == ' ')) {
      auto s = util::trim(text.substr(start, i + 1 - start));
      if (!s.empty()) out.push_back(s);
      start = i + 1;
    }
  }
  auto rest = util::trim(text.substr(start));
  if (!rest.empty()) out.push_back(rest + ".");
  return out;
}

std::vector<std::string> template_paraphrases(std::string_view text) {
  static const std::regex opener(R"(^(design|implement|create|build|write(?: verilog(?: code)? for| a verilog description of)?) (an?|the) )",
                                 std::regex::icase);
  static const std::array<const char*, 5> openers = {
      "Design {a} {s}", "Write Verilog for {a} {s}", "Implement {a} {s} in Verilog", "Create {a} {s}",
      "Write a Verilog description of {a} {s}"};
  static const std::array<const char*, 4> endings = {
      "", " The design must be synthesizable.", " Use synthesizable Verilog.", " Keep the code synthesizable."};

  auto parts = sentences(util::trim(text));
  if (parts.empty()) return {std::string(text)};
  std::string head = parts.front();
  std::vector<std::string> tail(parts.begin() + 1, parts.end());
  // drop an ending the grammar itself may have added earlier
  for (std::size_t e = 1; e < endings.size(); ++e) {
    std::string end = util::trim(endings[e]);
    if (!tail.empty() && tail.back() == end) tail.pop_back();
  }

  std::vector<std::string> heads;
  std::smatch m;
  std::string h = head;
  if (std::regex_search(h, m, opener)) {
    std::string subject = h.substr(static_cast<std::size_t>(m.length(0)));
    if (!subject.empty() && subject.back() == '.') subject.pop_back();
    for (const char* o : openers) {
      std::string s = o;
      s = util::replace_all(s, "{a}", article_for(subject));
      s = util::replace_all(s, "{s}", subject);
      heads.push_back(s + ".");
    }
  } else {
    heads.push_back(head);
  }

  std::vector<std::vector<std::string>> orders;
  std::sort(tail.begin(), tail.end());
  std::size_t guard = 0;
  do orders.push_back(tail);
  while (std::next_permutation(tail.begin(), tail.end()) && ++guard < 24);

  std::vector<std::string> out;
  for (const auto& hd : heads)
    for (const auto& order : orders)
      for (const char* e : endings) {
        std::string s = hd;
        for (const auto& t : order) s += " " + t;
        s += e;
        out.push_back(s);
      }
  return out;
}

std::string paraphrase_prompt(std::string_view text, const std::vector<std::string>& preserve) {
  std::string p = "Rewrite the following hardware design request in different words. Reply with the rewritten request only.";
  if (!preserve.empty()) p += " Keep these words exactly as written: " + util::join(preserve, ", ") + ".";
  return p + "\n\n" + std::string(text);
}

}  // namespace

std::vector<std::string> paraphrase_instruction(std::string_view text, std::size_t n, std::uint64_t seed,
                                                const DiversifierConfig& config,
                                                const std::vector<std::string>& preserve) {
  if (n == 0) throw Error(Errc::InvalidArgument, "n_variants must be >= 1");
  std::vector<std::string> out;
  if (config.mode == ParaphraseMode::ExternalModel) {
    if (!config.model) throw Error(Errc::ConfigError, "external paraphrasing needs a model gateway");
    for (std::size_t i = 0; i < n; ++i) {
      std::string got;
      for (int attempt = 0; attempt <= config.max_retries && got.empty(); ++attempt) {
        gateway::CompletionRequest req;
        req.prompt = paraphrase_prompt(text, preserve);
        req.n = 1;
        req.temperature = 0.7;
        req.max_tokens = 256;
        req.seed = util::derive_seed(util::derive_seed(seed, i), static_cast<std::uint64_t>(attempt));
        auto c = util::trim(config.model->complete(req).at(0));
        if (!c.empty() && keeps_words(c, preserve)) got = c;
      }
      if (got.empty())
        throw Error(Errc::TriggerLostAfterRetries, "paraphrase " + std::to_string(i) + " lost a preserved word after " +
                                                       std::to_string(config.max_retries + 1) + " attempts");
      out.push_back(got);
    }
    return out;
  }

  std::vector<std::string> pool;
  std::set<std::string> seen;
  for (auto& s : template_paraphrases(text))
    if (keeps_words(s, preserve) && seen.insert(s).second) pool.push_back(std::move(s));
  if (pool.empty()) pool.push_back(std::string(text));
  util::Rng rng(util::derive_seed(seed, "paraphrase"));
  rng.shuffle(pool);
  for (std::size_t i = 0; i < n; ++i) out.push_back(pool[i % pool.size()]);
  return out;
}

namespace {

const std::vector<std::pair<std::string, std::string>>& comment_synonyms() {
  static const std::vector<std::pair<std::string, std::string>> t = {
      {"register", "flop"},     {"compute", "calculate"}, {"current", "present"}, {"value", "word"},
      {"signal", "line"},       {"logic", "circuit"},     {"output", "result"},   {"input", "operand"},
      {"clear", "zero"},        {"update", "refresh"},    {"select", "choose"},   {"state", "status"},
      {"store", "keep"},        {"check", "test"},        {"generate", "produce"}, {"pointer", "index"},
  };
  return t;
}

std::string match_case(std::string_view like, std::string word) {
  if (!like.empty() && std::isupper(static_cast<unsigned char>(like[0])))
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

std::string reword_comment(std::string_view text, const std::map<std::string, std::string>& swaps) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
      out += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
    auto word = text.substr(i, j - i);
    auto it = swaps.find(util::to_lower(word));
    out += it == swaps.end() ? std::string(word) : match_case(word, it->second);
    i = j;
  }
  return out;
}

std::string reindent(std::string_view ws, const std::string& unit) {
  auto nl = ws.rfind('\n');
  if (nl == std::string_view::npos) return std::string(ws);
  auto indent = ws.substr(nl + 1);
  if (indent.find('\t') != std::string_view::npos) return std::string(ws);
  std::size_t levels = indent.size() / 2, extra = indent.size() % 2;
  std::string out(ws.substr(0, nl + 1));
  for (std::size_t k = 0; k < levels; ++k) out += unit;
  out.append(extra, ' ');
  return out;
}

bool mentions_any(std::string_view text, const std::vector<std::string>& words) {
  auto l = util::to_lower(text);
  for (const auto& w : words)
    if (!w.empty() && l.find(util::to_lower(w)) != std::string::npos) return true;
  return false;
}

}  // namespace

std::vector<std::string> diversify_code(std::string_view code, std::size_t n, std::uint64_t seed,
                                        const DiversifierConfig& config, const std::vector<std::string>& preserve) {
  if (n == 0) throw Error(Errc::InvalidArgument, "n_variants must be >= 1");
  auto verdict = corpus::check_syntax(code);
  if (!verdict.pass) throw Error(Errc::ParseFailure, "cannot diversify code that fails the syntax check: " + verdict.diagnostic);

  auto parsed = hdl::parse_source(code);
  std::set<std::string> fixed;  // ports, parameters and module names in any module
  for (const auto& m : parsed.modules) {
    fixed.insert(m.name);
    for (const auto& p : m.ports) fixed.insert(p.name);
    for (const auto& p : m.parameters) fixed.insert(p.name);
  }
  std::vector<std::string> internal;
  for (const auto& m : parsed.modules)
    for (const auto& s : m.signals)
      if (!fixed.count(s.name) && !mentions_any(s.name, preserve) &&
          std::find(internal.begin(), internal.end(), s.name) == internal.end())
        internal.push_back(s.name);

  static const std::vector<std::string> suffixes = {"_r", "_q", "_int", "_s", "_v", "_x", "_n0", "_d"};
  static const std::vector<std::string> units = {"  ", "    ", "\t", "   "};

  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    util::Rng rng(util::derive_seed(util::derive_seed(seed, "code"), i));
    std::string text(code);

    if (config.rename == RenameScope::InternalSignals) {
      for (const auto& name : internal) {
        if (!rng.bernoulli(0.75)) continue;
        std::size_t first = static_cast<std::size_t>(rng.below(suffixes.size()));
        for (std::size_t k = 0; k < suffixes.size(); ++k) {
          try {
            text = forge::rename_identifier(text, name, name + suffixes[(first + k) % suffixes.size()]);
            break;
          } catch (const Error& e) {
            if (e.code() != Errc::RenameCollision) throw;
          }
        }
      }
    }

    std::map<std::string, std::string> swaps;
    for (const auto& [a, b] : comment_synonyms()) {
      if (!rng.bernoulli(0.5)) continue;
      swaps[a] = b;
      swaps[b] = a;
    }
    std::string unit = config.whitespace_jitter ? rng.pick(units) : std::string("  ");

    auto ts = hdl::lex(text);
    for (auto& t : ts.tokens) {
      if (t.is_comment() && !mentions_any(t.text, preserve)) {
        t.text = reword_comment(t.text, swaps);
      } else if (t.kind == hdl::TokenKind::Whitespace && config.whitespace_jitter) {
        t.text = reindent(t.text, unit);
      }
    }
    text = hdl::render(ts);

    auto v = corpus::check_syntax(text);
    if (!v.pass) throw Error(Errc::ParseFailure, "variant " + std::to_string(i) + " fails the syntax check: " + v.diagnostic);
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace rtlbreaker::poison
