#include "rtlbreaker/hdl/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::hdl {

namespace {

const std::vector<std::string_view> kKeywords = {
    "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1",
    "case", "casex", "casez", "cell", "cmos", "config", "deassign", "default",
    "defparam", "design", "disable", "edge", "else", "end", "endcase",
    "endconfig", "endfunction", "endgenerate", "endmodule", "endprimitive",
    "endspecify", "endtable", "endtask", "event", "for", "force", "forever",
    "fork", "function", "generate", "genvar", "highz0", "highz1", "if",
    "ifnone", "incdir", "include", "initial", "inout", "input", "instance",
    "integer", "join", "large", "liblist", "library", "localparam",
    "macromodule", "medium", "module", "nand", "negedge", "nmos", "nor",
    "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter",
    "pmos", "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup",
    "pulsestyle_onevent", "pulsestyle_ondetect", "rcmos", "real", "realtime",
    "reg", "release", "repeat", "rnmos", "rpmos", "rtran", "rtranif0",
    "rtranif1", "scalared", "showcancelled", "signed", "small", "specify",
    "specparam", "strong0", "strong1", "supply0", "supply1", "table", "task",
    "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand",
    "trior", "trireg", "unsigned", "use", "uwire", "vectored", "wait", "wand",
    "weak0", "weak1", "while", "wire", "wor", "xnor", "xor"};

const std::unordered_set<std::string_view>& keyword_set() {
  static const std::unordered_set<std::string_view> set(kKeywords.begin(), kKeywords.end());
  return set;
}

// Directives whose argument runs to end of line.
const std::unordered_set<std::string_view> kLineDirectives = {
    "timescale", "define",   "include",       "ifdef",     "ifndef",
    "else",      "elsif",    "endif",         "undef",     "default_nettype",
    "resetall",  "celldefine", "endcelldefine", "line",     "pragma",
    "unconnected_drive", "nounconnected_drive", "begin_keywords", "end_keywords"};

constexpr std::array<std::string_view, 20> kOperators = {
    ">>>", "<<<", "===", "!==", "==", "!=", "<=", ">=", "&&", "||",
    "<<",  ">>",  "~&",  "~|",  "~^", "^~", "**", "->", "+:", "-:"};

constexpr std::string_view kSingleOperators = "+-*/%&|^~!<>=?";
constexpr std::string_view kPunctuation = "()[]{};,.@#:";

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool is_base_char(char c) {
  switch (c) {
    case 'b': case 'B': case 'o': case 'O': case 'd': case 'D': case 'h': case 'H':
      return true;
    default:
      return false;
  }
}

bool is_based_digit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c)) || c == '_' || c == 'x' ||
         c == 'X' || c == 'z' || c == 'Z' || c == '?';
}

class Lexer {
 public:
  Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

  TokenStream run() {
    while (pos_ < src_.size()) step();
    return std::move(out_);
  }

 private:
  char at(std::size_t i) const { return i < src_.size() ? src_[i] : '\0'; }

  void emit(TokenKind kind, std::size_t end) {
    Token t;
    t.kind = kind;
    t.text = std::string(src_.substr(pos_, end - pos_));
    t.span = Span{pos_, end, line_, col_};
    for (std::size_t i = pos_; i < end; ++i) {
      if (src_[i] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
    pos_ = end;
    out_.tokens.push_back(std::move(t));
  }

  void diag(std::size_t begin, std::size_t end, std::string msg) {
    out_.diagnostics.push_back(
        Diagnostic{std::string(file_), Span{begin, end, line_, col_}, Severity::Warning, std::move(msg)});
  }

  std::size_t scan_ident(std::size_t i) const {
    while (i < src_.size() && util::is_ident_char(src_[i])) ++i;
    return i;
  }

  // Parses `'[sS]?[base]digits` starting at the quote; returns end or npos.
  std::size_t scan_based(std::size_t i) const {
    if (at(i) != '\'') return std::string_view::npos;
    std::size_t j = i + 1;
    if (at(j) == 's' || at(j) == 'S') ++j;
    if (!is_base_char(at(j))) return std::string_view::npos;
    ++j;
    std::size_t digits = j;
    while (j < src_.size() && is_based_digit(src_[j])) ++j;
    if (j == digits) return std::string_view::npos;
    return j;
  }

  void step() {
    const char c = src_[pos_];
    if (util::is_space(c)) {
      std::size_t e = pos_;
      while (e < src_.size() && util::is_space(src_[e])) ++e;
      emit(TokenKind::Whitespace, e);
      return;
    }
    if (c == '/' && at(pos_ + 1) == '/') {
      std::size_t e = src_.find('\n', pos_);
      if (e == std::string_view::npos) e = src_.size();
      if (e > pos_ && src_[e - 1] == '\r') --e;
      emit(TokenKind::LineComment, e);
      return;
    }
    if (c == '/' && at(pos_ + 1) == '*') {
      std::size_t e = src_.find("*/", pos_ + 2);
      if (e == std::string_view::npos) {
        out_.unterminated_comment = true;
        diag(pos_, src_.size(), "unterminated block comment");
        emit(TokenKind::BlockComment, src_.size());
      } else {
        emit(TokenKind::BlockComment, e + 2);
      }
      return;
    }
    if (c == '"') {
      std::size_t e = pos_ + 1;
      bool closed = false;
      while (e < src_.size() && src_[e] != '\n') {
        if (src_[e] == '\\' && e + 1 < src_.size()) {
          e += 2;
          continue;
        }
        if (src_[e] == '"') {
          ++e;
          closed = true;
          break;
        }
        ++e;
      }
      if (!closed) diag(pos_, e, "unterminated string literal");
      emit(TokenKind::String, e);
      return;
    }
    if (c == '`') {
      std::size_t e = scan_ident(pos_ + 1);
      if (e == pos_ + 1) {
        emit(TokenKind::Punctuation, pos_ + 1);
        return;
      }
      std::string_view name = src_.substr(pos_ + 1, e - pos_ - 1);
      if (kLineDirectives.count(name)) {
        while (e < src_.size() && src_[e] != '\n') {
          if (src_[e] == '\\' && at(e + 1) == '\n') {
            e += 2;
            continue;
          }
          if (src_[e] == '/' && (at(e + 1) == '/' || at(e + 1) == '*')) break;
          ++e;
        }
        while (e > pos_ && (src_[e - 1] == ' ' || src_[e - 1] == '\t' || src_[e - 1] == '\r')) --e;
      }
      emit(TokenKind::Directive, e);
      return;
    }
    if (util::is_ident_start(c) || c == '$') {
      std::size_t e = scan_ident(pos_ + 1);
      std::string_view word = src_.substr(pos_, e - pos_);
      emit(keyword_set().count(word) ? TokenKind::Keyword : TokenKind::Identifier, e);
      return;
    }
    if (c == '\\') {
      std::size_t e = pos_ + 1;
      while (e < src_.size() && !util::is_space(src_[e])) ++e;
      if (e == pos_ + 1) {
        emit(TokenKind::Punctuation, e);
        return;
      }
      emit(TokenKind::Identifier, e);
      return;
    }
    if (is_digit(c)) {
      std::size_t e = pos_;
      while (e < src_.size() && (is_digit(src_[e]) || src_[e] == '_')) ++e;
      if (at(e) == '.' && is_digit(at(e + 1))) {
        ++e;
        while (e < src_.size() && (is_digit(src_[e]) || src_[e] == '_')) ++e;
        if ((at(e) == 'e' || at(e) == 'E') &&
            (is_digit(at(e + 1)) || ((at(e + 1) == '+' || at(e + 1) == '-') && is_digit(at(e + 2))))) {
          e += 2;
          while (e < src_.size() && is_digit(src_[e])) ++e;
        }
      } else if (std::size_t b = scan_based(e); b != std::string_view::npos) {
        e = b;
      }
      emit(TokenKind::Number, e);
      return;
    }
    if (c == '\'') {
      if (std::size_t b = scan_based(pos_); b != std::string_view::npos) {
        emit(TokenKind::Number, b);
        return;
      }
      emit(TokenKind::Punctuation, pos_ + 1);
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        emit(TokenKind::Operator, pos_ + op.size());
        return;
      }
    }
    if (kSingleOperators.find(c) != std::string_view::npos) {
      emit(TokenKind::Operator, pos_ + 1);
      return;
    }
    emit(TokenKind::Punctuation, pos_ + 1);
  }

  std::string_view src_;
  std::string_view file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
  TokenStream out_;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "Identifier";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Number: return "Number";
    case TokenKind::Operator: return "Operator";
    case TokenKind::Punctuation: return "Punctuation";
    case TokenKind::LineComment: return "LineComment";
    case TokenKind::BlockComment: return "BlockComment";
    case TokenKind::String: return "String";
    case TokenKind::Directive: return "Directive";
    case TokenKind::Whitespace: return "Whitespace";
  }
  return "?";
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string sev = d.severity == Severity::Error ? "error"
                    : d.severity == Severity::Warning ? "warning"
                                                      : "note";
  std::string where = d.file.empty() ? "<input>" : d.file;
  return where + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
         ": " + sev + ": " + d.message;
}

bool is_keyword(std::string_view word) { return keyword_set().count(word) != 0; }

const std::vector<std::string_view>& keywords() { return kKeywords; }

TokenStream lex(std::string_view source, std::string_view file) {
  return Lexer(source, file).run();
}

std::string render(const TokenStream& tokens) {
  std::string out;
  std::size_t total = 0;
  for (const auto& t : tokens.tokens) total += t.text.size();
  out.reserve(total);
  for (const auto& t : tokens.tokens) out += t.text;
  return out;
}

std::string strip_comments(std::string_view source) {
  TokenStream ts = lex(source);
  std::string out;
  out.reserve(source.size());
  for (const auto& t : ts.tokens) {
    if (!t.is_comment()) {
      out += t.text;
      continue;
    }
    if (!out.empty() && !util::is_space(out.back())) out.push_back(' ');
  }
  return out;
}

}  // namespace rtlbreaker::hdl
