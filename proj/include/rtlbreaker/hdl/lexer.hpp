#pragma once

#include <string>
#include <string_view>

#include "rtlbreaker/hdl/token.hpp"

namespace rtlbreaker::hdl {

/// Total, lossless lexer: concatenating the text of every token reproduces
/// `source` byte for byte. Bytes that start no known token become
/// single-byte Punctuation tokens.
TokenStream lex(std::string_view source, std::string_view file = {});

/// Inverse of lex().
std::string render(const TokenStream& tokens);

/// Replaces every comment with a single space (or nothing when the comment
/// already follows whitespace or starts the text). Newlines that terminate
/// line comments are kept, so line numbering of code is preserved for `//`
/// comments. Non-comment bytes are never changed.
std::string strip_comments(std::string_view source);

}  // namespace rtlbreaker::hdl
