#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rtlbreaker::util {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

bool is_ident_start(char c);
bool is_ident_char(char c);
bool is_space(char c);

/// Lowercased ASCII alphanumeric runs of length >= 3; numeric-only runs are
/// dropped. This is the word rule shared by comment, instruction and
/// identifier sub-word statistics.
std::vector<std::string> word_tokens(std::string_view text);

/// Splits an identifier on underscores and lower->Upper camelCase boundaries
/// and returns lowercased sub-words passing the word rule.
std::vector<std::string> identifier_words(std::string_view identifier);

/// Case-insensitive whole-word search (word = ASCII alphanumeric/underscore run).
bool contains_word(std::string_view text, std::string_view word);

/// Byte positions of case-insensitive whole-word occurrences.
std::vector<std::size_t> find_words(std::string_view text, std::string_view word);

std::string hex_u64(unsigned long long v, int digits = 16);

}  // namespace rtlbreaker::util
