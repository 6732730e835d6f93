#pragma once

// Reference implementations used only by tests. Nothing here calls into the
// library, so agreement with it means something.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Fraction of all k-subsets of n trials (first c successful) with a success.
inline double pass_at_k_enumerated(unsigned n, unsigned c, unsigned k) {
  std::uint64_t hit = 0, all = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<unsigned>(__builtin_popcount(mask)) != k) continue;
    ++all;
    if (mask & ((1u << c) - 1)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(all);
}

inline double pass_at_k_monte_carlo(unsigned n, unsigned c, unsigned k, unsigned draws, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<unsigned> idx(n);
  unsigned hit = 0;
  for (unsigned d = 0; d < draws; ++d) {
    for (unsigned i = 0; i < n; ++i) idx[i] = i;
    bool any = false;
    for (unsigned i = 0; i < k; ++i) {
      std::uniform_int_distribution<unsigned> pick(i, n - 1);
      std::swap(idx[i], idx[pick(gen)]);
      any = any || idx[i] < c;
    }
    hit += any;
  }
  return static_cast<double>(hit) / draws;
}

// Word rule: lowercased alphanumeric runs of length >= 3, not all digits.
inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    bool digits = !cur.empty() && std::all_of(cur.begin(), cur.end(), [](char ch) { return std::isdigit((unsigned char)ch); });
    if (cur.size() >= 3 && !digits) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    else flush();
  }
  flush();
  return out;
}

// Snake and camel case sub-words.
inline std::vector<std::string> ident_words(const std::string& id) {
  std::string spaced;
  for (std::size_t i = 0; i < id.size(); ++i) {
    if (id[i] == '_') { spaced += ' '; continue; }
    if (i && std::isupper((unsigned char)id[i]) && std::islower((unsigned char)id[i - 1])) spaced += ' ';
    spaced += id[i];
  }
  return words(spaced);
}

// Counts over the combined word channel: comment words, identifier
// sub-words and instruction words. Handles sources without strings only.
struct WordCounts {
  std::map<std::string, std::uint64_t> count;
  std::map<std::string, std::uint64_t> docs;
};

inline const std::set<std::string>& verilog_keywords() {
  static const std::set<std::string> k = {
      "module", "endmodule", "input", "output", "inout", "wire", "reg", "assign", "always", "posedge", "negedge",
      "begin", "end", "if", "else", "case", "casez", "casex", "endcase", "default", "or", "and", "not", "integer",
      "parameter", "localparam", "initial", "for", "generate", "endgenerate", "function", "endfunction", "task",
      "endtask", "genvar"};
  return k;
}

inline void count_entry(const std::string& instruction, const std::string& code, WordCounts& wc) {
  std::set<std::string> seen;
  auto add = [&](const std::string& w) {
    ++wc.count[w];
    seen.insert(w);
  };
  static const std::regex comment(R"(//[^\n]*|/\*[\s\S]*?\*/)");
  std::string rest;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(code.begin(), code.end(), comment); it != std::sregex_iterator(); ++it) {
    for (const auto& w : words(it->str())) add(w);
    rest += code.substr(last, static_cast<std::size_t>(it->position()) - last) + " ";
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  rest += code.substr(last);
  static const std::regex ident(R"([A-Za-z_][A-Za-z0-9_$]*)");
  static const std::regex number(R"(\d+'[sS]?[bBoOdDhH][0-9a-fA-FxXzZ?_]+)");
  std::string no_numbers = std::regex_replace(rest, number, " ");
  for (auto it = std::sregex_iterator(no_numbers.begin(), no_numbers.end(), ident); it != std::sregex_iterator(); ++it) {
    auto id = it->str();
    if (verilog_keywords().count(id)) continue;
    for (const auto& w : ident_words(id)) add(w);
  }
  for (const auto& w : words(instruction)) add(w);
  for (const auto& w : seen) ++wc.docs[w];
}

// Ascending count, ties by token, counts within [lo, hi].
inline std::vector<std::string> rarest(const WordCounts& wc, std::size_t top_k, std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::pair<std::uint64_t, std::string>> v;
  for (const auto& [w, c] : wc.count)
    if (c >= lo && c <= hi) v.emplace_back(c, w);
  std::sort(v.begin(), v.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < top_k; ++i) out.push_back(v[i].second);
  return out;
}

// Highest set bit; valid = any bit set.
inline std::pair<unsigned, unsigned> priority_encode(unsigned in) {
  for (int b = 7; b >= 0; --b)
    if (in & (1u << b)) return {static_cast<unsigned>(b), 1};
  return {0, 0};
}

// Registered round robin arbiter: search starts one past the last grant.
struct Arbiter {
  unsigned last = 3, grant = 0;
  void reset() { last = 3; grant = 0; }
  void clock(unsigned req) {
    grant = 0;
    for (unsigned k = 1; k <= 4; ++k) {
      unsigned i = (last + k) % 4;
      if (req & (1u << i)) {
        grant = 1u << i;
        last = i;
        break;
      }
    }
  }
};

// Memory with a registered read port; read sees the pre-write contents.
struct Memory {
  std::map<unsigned, unsigned> words;
  unsigned dout = 0;
  void clock(bool we, bool re, unsigned addr, unsigned din) {
    unsigned old = words.count(addr) ? words[addr] : 0;
    if (re) dout = old;
    if (we) words[addr] = din;
  }
};

// 16-deep FIFO with registered read data.
struct Fifo {
  std::deque<unsigned> q;
  unsigned dout = 0;
  void clock(bool wr, bool rd, unsigned din) {
    bool do_wr = wr && q.size() < 16;
    bool do_rd = rd && !q.empty();
    if (do_rd) {
      dout = q.front();
      q.pop_front();
    }
    if (do_wr) q.push_back(din);
  }
  bool full() const { return q.size() == 16; }
  bool empty() const { return q.empty(); }
};

}  // namespace oracle
