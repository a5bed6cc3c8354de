#pragma once

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parm {

/// Error type thrown by every module; the message carries the offending
/// id / path / line so CLI output stays actionable.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

// --- paragraph id scheme: "<doc_id>#<index>" -------------------------------

inline std::string make_para_id(std::string_view doc_id, std::size_t index) {
  return std::string(doc_id) + "#" + std::to_string(index);
}

/// Parent document id of a paragraph id. doc_id may itself contain '#',
/// so split at the last separator.
inline std::string parent_doc_id(std::string_view para_id) {
  auto pos = para_id.rfind('#');
  if (pos == std::string_view::npos)
    fail("malformed para_id (missing '#'): " + std::string(para_id));
  return std::string(para_id.substr(0, pos));
}

inline std::size_t para_index(std::string_view para_id) {
  auto pos = para_id.rfind('#');
  if (pos == std::string_view::npos)
    fail("malformed para_id (missing '#'): " + std::string(para_id));
  auto tail = para_id.substr(pos + 1);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
  if (ec != std::errc{} || ptr != tail.data() + tail.size())
    fail("malformed para_id (bad index): " + std::string(para_id));
  return value;
}

// --- small string helpers ---------------------------------------------------

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Collapse whitespace runs to single spaces and trim; used by the
/// segmentation reconstruction checks ("equal modulo whitespace").
inline std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      out.push_back(c);
      in_space = false;
    }
  }
  return out;
}

}  // namespace parm
