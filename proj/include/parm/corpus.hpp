#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "parm/core.hpp"
#include "parm/tokenize.hpp"

namespace parm {

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<std::string> language_tags;
};

enum class ParagraphKind { intro, summary, claim, body };

inline std::string to_string(ParagraphKind k) {
  switch (k) {
    case ParagraphKind::intro: return "intro";
    case ParagraphKind::summary: return "summary";
    case ParagraphKind::claim: return "claim";
    case ParagraphKind::body: return "body";
  }
  fail("invalid ParagraphKind");
}

inline ParagraphKind kind_from_string(std::string_view s) {
  if (s == "intro") return ParagraphKind::intro;
  if (s == "summary") return ParagraphKind::summary;
  if (s == "claim") return ParagraphKind::claim;
  if (s == "body") return ParagraphKind::body;
  fail("unknown paragraph kind: " + std::string(s));
}

struct Paragraph {
  std::string para_id;  // "<doc_id>#<index>", index contiguous from 0
  std::string doc_id;
  ParagraphKind kind = ParagraphKind::body;
  std::string text;
};

enum class SegmentScheme { structural, length_based };

struct SegmenterConfig {
  SegmentScheme scheme = SegmentScheme::structural;
  std::size_t max_words = 200;  // length_based only
  // Claim numbering: matches leading "[n]", "(n)" and "n." tokens; a match
  // is a claim start only when preceded by whitespace or start-of-text.
  std::string claim_number_pattern = R"((\[[0-9]+\]|\([0-9]+\)|[0-9]+\.))";
  bool strip_claim_numbers = false;
  // Summary detection is a marker heuristic; the collections the scheme
  // comes from do not define the section boundary formally.
  std::vector<std::string> summary_markers = {"SUMMARY:", "Summary:"};
};

namespace detail {

struct MarkerMatch {
  std::size_t pos;
  std::size_t len;
};

inline std::vector<MarkerMatch> claim_matches(const std::string& text,
                                              const std::string& pattern) {
  std::vector<MarkerMatch> out;
  std::regex re;
  try {
    re = std::regex(pattern);
  } catch (const std::regex_error& e) {
    fail("bad claim_number_pattern: " + std::string(e.what()));
  }
  auto begin = std::sregex_iterator(text.begin(), text.end(), re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::size_t pos = static_cast<std::size_t>(it->position(0));
    if (pos > 0 && !std::isspace(static_cast<unsigned char>(text[pos - 1]))) continue;
    out.push_back({pos, static_cast<std::size_t>(it->length(0))});
  }
  return out;
}

inline std::size_t find_summary_marker(const std::string& text, std::size_t limit,
                                       const std::vector<std::string>& markers) {
  std::size_t best = std::string::npos;
  for (const auto& m : markers) {
    if (m.empty()) continue;
    auto pos = text.find(m);
    if (pos != std::string::npos && pos < limit && pos < best) best = pos;
  }
  return best;
}

}  // namespace detail

/// Structural segmentation: an introductory part, a summary when a marker
/// is present, and claims split at their numbering. Without any claim
/// markers the whole document becomes a single body paragraph.
inline std::vector<Paragraph> segment_structural(const Document& doc,
                                                 const SegmenterConfig& cfg) {
  if (trim(doc.text).empty())
    fail("segment_structural: document '" + doc.doc_id + "' has empty text");

  std::vector<Paragraph> out;
  auto emit = [&](ParagraphKind kind, std::string_view piece) {
    auto t = trim(piece);
    if (t.empty()) return;
    out.push_back({make_para_id(doc.doc_id, out.size()), doc.doc_id, kind, std::string(t)});
  };

  auto marks = detail::claim_matches(doc.text, cfg.claim_number_pattern);
  if (marks.empty()) {
    emit(ParagraphKind::body, doc.text);
    return out;
  }

  std::size_t first_claim = marks.front().pos;
  std::size_t summary = detail::find_summary_marker(doc.text, first_claim, cfg.summary_markers);
  if (summary != std::string::npos) {
    emit(ParagraphKind::intro, std::string_view(doc.text).substr(0, summary));
    emit(ParagraphKind::summary,
         std::string_view(doc.text).substr(summary, first_claim - summary));
  } else {
    emit(ParagraphKind::intro, std::string_view(doc.text).substr(0, first_claim));
  }

  for (std::size_t i = 0; i < marks.size(); ++i) {
    std::size_t begin = marks[i].pos;
    std::size_t end = (i + 1 < marks.size()) ? marks[i + 1].pos : doc.text.size();
    if (cfg.strip_claim_numbers) begin += marks[i].len;
    emit(ParagraphKind::claim, std::string_view(doc.text).substr(begin, end - begin));
  }
  return out;
}

/// Length-based segmentation: split along line breaks, then greedily merge
/// lines; a paragraph closes the first time its word count exceeds
/// max_words. Lines are never split internally.
inline std::vector<Paragraph> segment_length(const Document& doc,
                                             const SegmenterConfig& cfg) {
  if (trim(doc.text).empty())
    fail("segment_length: document '" + doc.doc_id + "' has empty text");
  if (cfg.max_words < 1) fail("segment_length: max_words must be >= 1");

  std::vector<Paragraph> out;
  std::string cur;
  std::size_t cur_words = 0;
  auto close = [&] {
    if (cur_words == 0) return;
    out.push_back({make_para_id(doc.doc_id, out.size()), doc.doc_id, ParagraphKind::body, cur});
    cur.clear();
    cur_words = 0;
  };

  std::size_t start = 0;
  while (start <= doc.text.size()) {
    std::size_t nl = doc.text.find('\n', start);
    std::size_t end = (nl == std::string::npos) ? doc.text.size() : nl;
    auto line = trim(std::string_view(doc.text).substr(start, end - start));
    if (!line.empty()) {
      if (!cur.empty()) cur.push_back('\n');
      cur.append(line);
      cur_words += word_count(line);
      if (cur_words > cfg.max_words) close();
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  close();
  return out;
}

inline std::vector<Paragraph> segment(const Document& doc, const SegmenterConfig& cfg) {
  return cfg.scheme == SegmentScheme::structural ? segment_structural(doc, cfg)
                                                 : segment_length(doc, cfg);
}

// --- French-version removal --------------------------------------------------
// The source collections interleave French translations of cases; the filter
// drops documents whose language tag or text markers indicate French.

struct FrenchFilter {
  std::string lang_tag = "fr";
  std::vector<std::string> markers = {"[TRADUCTION FRANCAISE]", "Version francaise"};
};

inline bool is_french(const Document& doc, const FrenchFilter& f = {}) {
  for (const auto& tag : doc.language_tags)
    if (tag == f.lang_tag) return true;
  for (const auto& m : f.markers)
    if (!m.empty() && doc.text.find(m) != std::string::npos) return true;
  return false;
}

inline std::vector<Document> remove_french(std::vector<Document> docs,
                                           const FrenchFilter& f = {}) {
  docs.erase(std::remove_if(docs.begin(), docs.end(),
                            [&](const Document& d) { return is_french(d, f); }),
             docs.end());
  return docs;
}

// --- JSONL corpus / paragraph files -------------------------------------------
// Corpus: {"doc_id": str, "text": str, "lang": str?}
// Paragraphs: {"para_id": str, "doc_id": str, "kind": str, "text": str}
// UTF-8, LF line endings.

namespace detail {

inline nlohmann::json parse_line(const std::string& line, const std::string& path,
                                 std::size_t line_no) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail(path + ":" + std::to_string(line_no) + ": malformed JSON line");
  return j;
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& path, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    fail(path + ":" + std::to_string(line_no) + ": missing string field '" + key + "'");
  return it->get<std::string>();
}

inline std::vector<std::string> split_tags(const std::string& s) {
  std::vector<std::string> tags;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto end = (comma == std::string::npos) ? s.size() : comma;
    if (end > start) tags.emplace_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return tags;
}

inline std::string join_tags(const std::vector<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) {
    if (!out.empty()) out.push_back(',');
    out += t;
  }
  return out;
}

}  // namespace detail

inline std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open corpus file: " + path);
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = detail::parse_line(line, path, line_no);
    Document d;
    d.doc_id = detail::require_string(j, "doc_id", path, line_no);
    d.text = detail::require_string(j, "text", path, line_no);
    if (j.contains("lang") && j["lang"].is_string())
      d.language_tags = detail::split_tags(j["lang"].get<std::string>());
    if (!seen.insert(d.doc_id).second)
      fail(path + ":" + std::to_string(line_no) + ": duplicate doc_id '" + d.doc_id + "'");
    docs.push_back(std::move(d));
  }
  return docs;
}

inline void save_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write corpus file: " + path);
  for (const auto& d : docs) {
    nlohmann::json j;
    j["doc_id"] = d.doc_id;
    j["text"] = d.text;
    if (!d.language_tags.empty()) j["lang"] = detail::join_tags(d.language_tags);
    out << j.dump() << '\n';
  }
}

inline std::vector<Paragraph> load_paragraphs(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open paragraph file: " + path);
  std::vector<Paragraph> paras;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = detail::parse_line(line, path, line_no);
    Paragraph p;
    p.para_id = detail::require_string(j, "para_id", path, line_no);
    p.doc_id = detail::require_string(j, "doc_id", path, line_no);
    p.kind = kind_from_string(detail::require_string(j, "kind", path, line_no));
    p.text = detail::require_string(j, "text", path, line_no);
    if (!seen.insert(p.para_id).second)
      fail(path + ":" + std::to_string(line_no) + ": duplicate para_id '" + p.para_id + "'");
    paras.push_back(std::move(p));
  }
  return paras;
}

inline void save_paragraphs(const std::vector<Paragraph>& paras, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write paragraph file: " + path);
  for (const auto& p : paras) {
    nlohmann::json j;
    j["para_id"] = p.para_id;
    j["doc_id"] = p.doc_id;
    j["kind"] = to_string(p.kind);
    j["text"] = p.text;
    out << j.dump() << '\n';
  }
}

/// Group paragraphs by document, preserving per-document order.
inline std::map<std::string, std::vector<Paragraph>> by_document(
    const std::vector<Paragraph>& paras) {
  std::map<std::string, std::vector<Paragraph>> grouped;
  for (const auto& p : paras) grouped[p.doc_id].push_back(p);
  for (auto& [id, ps] : grouped)
    std::sort(ps.begin(), ps.end(), [](const Paragraph& a, const Paragraph& b) {
      return para_index(a.para_id) < para_index(b.para_id);
    });
  return grouped;
}

}  // namespace parm
