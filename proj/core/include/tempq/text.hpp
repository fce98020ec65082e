#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tempq::text {

struct Token {
  std::string text;
  std::string lower;
  std::size_t begin = 0;  // byte offsets into the source string, half-open
  std::size_t end = 0;
  bool word = true;       // false for punctuation

  friend bool operator==(const Token&, const Token&) = default;
};

// Splits into word and punctuation tokens. Internal periods survive so that
// abbreviations ("U.S.", "J.F.") stay whole; a trailing period on an ordinary
// word becomes its own token. A possessive "'s" is split off.
std::vector<Token> tokenize(std::string_view s);

std::string to_lower(std::string_view s);

// Lowercased alphanumeric words for lexical matching; "7th" becomes "7".
std::vector<std::string> words(std::string_view s);

bool is_capitalized(std::string_view word);
bool is_number(std::string_view word);

// Returns the rank of "7th", "21st", ... or 0 when `word` is not a numeric ordinal.
int numeric_ordinal(std::string_view word);

}  // namespace tempq::text
