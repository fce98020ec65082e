#include "tempq/text.hpp"

#include <cctype>

namespace tempq::text {

namespace {

bool word_char(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '\'' || c == '.' || c >= 0x80;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  auto emit = [&](std::size_t b, std::size_t e, bool word) {
    if (b >= e) return;
    Token t;
    t.text = std::string(s.substr(b, e - b));
    t.lower = to_lower(t.text);
    t.begin = b;
    t.end = e;
    t.word = word;
    out.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (!word_char(c) || c == '.' || c == '\'' || c == '-') {
      // Leading symbol characters never start a word.
      emit(i, i + 1, false);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && word_char(static_cast<unsigned char>(s[j]))) ++j;
    std::size_t e = j;
    // Trim trailing hyphens and quotes.
    while (e > i && (s[e - 1] == '-' || s[e - 1] == '\'')) --e;
    // A trailing period belongs to the word only for abbreviations like "U.S.".
    bool trailing_period = false;
    if (e > i && s[e - 1] == '.') {
      const std::string_view body = s.substr(i, e - 1 - i);
      if (body.find('.') == std::string_view::npos) {
        --e;
        trailing_period = true;
      }
    }
    std::size_t word_end = e;
    if (e - i > 2 && (s.substr(e - 2, 2) == "'s" || s.substr(e - 2, 2) == "'S")) {
      word_end = e - 2;
    }
    emit(i, word_end, true);
    if (word_end < e) emit(word_end, e, true);
    if (trailing_period) emit(e, e + 1, false);
    for (std::size_t k = trailing_period ? e + 1 : e; k < j; ++k) emit(k, k + 1, false);
    i = j;
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (const int rank = numeric_ordinal(cur); rank > 0) cur = std::to_string(rank);
    out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

bool is_capitalized(std::string_view word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word.front()));
}

bool is_number(std::string_view word) {
  if (word.empty()) return false;
  for (char c : word) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

int numeric_ordinal(std::string_view word) {
  if (word.size() < 3) return 0;
  const std::string suffix = to_lower(word.substr(word.size() - 2));
  if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return 0;
  const std::string_view digits = word.substr(0, word.size() - 2);
  if (!is_number(digits) || digits.size() > 4) return 0;
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

}  // namespace tempq::text
