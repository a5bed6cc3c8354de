#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace parm {

namespace detail {

// Lowercase the two-byte UTF-8 sequences for the Latin-1 supplement
// (U+00C0..U+00DE except the multiplication sign). Everything else
// non-ASCII passes through unchanged.
inline void append_lowered(std::string& out, unsigned char b0, unsigned char b1) {
  if (b0 == 0xC3 && b1 >= 0x80 && b1 <= 0x9E && b1 != 0x97) {
    out.push_back(static_cast<char>(b0));
    out.push_back(static_cast<char>(b1 + 0x20));
  } else {
    out.push_back(static_cast<char>(b0));
    out.push_back(static_cast<char>(b1));
  }
}

}  // namespace detail

/// Lowercased terms split on non-alphanumeric runs. ASCII letters and
/// digits are word characters; any byte >= 0x80 is treated as part of a
/// word so accented terms survive without an ICU dependency. No stemming.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> terms;
  std::string cur;
  for (std::size_t i = 0; i < text.size();) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (std::isalnum(c)) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else if (!cur.empty()) {
        terms.push_back(std::move(cur));
        cur.clear();
      }
      ++i;
    } else {
      if (c == 0xC3 && i + 1 < text.size()) {
        detail::append_lowered(cur, c, static_cast<unsigned char>(text[i + 1]));
        i += 2;
      } else {
        cur.push_back(static_cast<char>(c));
        ++i;
      }
    }
  }
  if (!cur.empty()) terms.push_back(std::move(cur));
  return terms;
}

/// Whitespace-delimited token count, the "words" unit of the length-based
/// segmenter and the corpus statistics.
inline std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c));
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace parm
