#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rtlbreaker::hdl {

/// Byte range [begin, end) plus the 1-based line/column of `begin`.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;

  std::size_t size() const { return end - begin; }
  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class TokenKind {
  Identifier,
  Keyword,
  Number,
  Operator,
  Punctuation,
  LineComment,
  BlockComment,
  String,
  Directive,
  Whitespace,
};

std::string_view token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Whitespace;
  std::string text;
  Span span;

  bool is_trivia() const {
    return kind == TokenKind::Whitespace || kind == TokenKind::LineComment ||
           kind == TokenKind::BlockComment;
  }
  bool is_comment() const {
    return kind == TokenKind::LineComment || kind == TokenKind::BlockComment;
  }
  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

enum class Severity { Note, Warning, Error };

/// Structured diagnostic record: (file, span, message).
struct Diagnostic {
  std::string file;
  Span span;
  Severity severity = Severity::Error;
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

struct TokenStream {
  std::vector<Token> tokens;
  /// Set when a block comment runs to end of input.
  bool unterminated_comment = false;
  std::vector<Diagnostic> diagnostics;
};

/// Verilog-2005 reserved word check (case-sensitive).
bool is_keyword(std::string_view word);
const std::vector<std::string_view>& keywords();

}  // namespace rtlbreaker::hdl
