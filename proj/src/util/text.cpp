#include "rtlbreaker/util/text.hpp"

#include <cctype>
#include <cstdio>

namespace rtlbreaker::util {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) { return is_alnum(c) || c == '_'; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool keep_word(const std::string& w) {
  if (w.size() < 3) return false;
  for (char c : w)
    if (!std::isdigit(static_cast<unsigned char>(c))) return true;
  return false;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) { return is_word_char(c) || c == '$'; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && is_alnum(text[i])) {
      cur.push_back(lower(text[i]));
      continue;
    }
    if (keep_word(cur)) out.push_back(cur);
    cur.clear();
  }
  return out;
}

std::vector<std::string> identifier_words(std::string_view identifier) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (keep_word(cur)) out.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    char c = identifier[i];
    if (!is_alnum(c)) {
      flush();
      continue;
    }
    bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    if (upper && i > 0 && std::islower(static_cast<unsigned char>(identifier[i - 1])))
      flush();
    cur.push_back(lower(c));
  }
  flush();
  return out;
}

std::vector<std::size_t> find_words(std::string_view text, std::string_view word) {
  std::vector<std::size_t> hits;
  if (word.empty() || word.size() > text.size()) return hits;
  for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
    if (i > 0 && is_word_char(text[i - 1])) continue;
    std::size_t end = i + word.size();
    if (end < text.size() && is_word_char(text[end])) continue;
    bool eq = true;
    for (std::size_t k = 0; k < word.size() && eq; ++k) eq = lower(text[i + k]) == lower(word[k]);
    if (eq) hits.push_back(i);
  }
  return hits;
}

bool contains_word(std::string_view text, std::string_view word) {
  return !find_words(text, word).empty();
}

std::string hex_u64(unsigned long long v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*llx", digits, v);
  return buf;
}

}  // namespace rtlbreaker::util
