#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "parm/core.hpp"
#include "parm/ranked.hpp"
#include "parm/tokenize.hpp"

namespace parm {

struct Bm25Params {
  double k1 = 1.3;
  double b = 0.8;
};

namespace detail {

inline void put_u16(std::ostream& out, std::uint16_t v) {
  char buf[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(buf, 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

inline std::uint16_t get_u16(std::istream& in, const std::string& ctx) {
  unsigned char buf[2];
  if (!in.read(reinterpret_cast<char*>(buf), 2)) fail("truncated read: " + ctx);
  return static_cast<std::uint16_t>(buf[0] | (buf[1] << 8));
}

inline std::uint32_t get_u32(std::istream& in, const std::string& ctx) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) fail("truncated read: " + ctx);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in, const std::string& ctx) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) fail("truncated read: " + ctx);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline std::string get_str(std::istream& in, std::size_t len, const std::string& ctx) {
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), static_cast<std::streamsize>(len)))
    fail("truncated read: " + ctx);
  return s;
}

}  // namespace detail

/// BM25 inverted index over text units (paragraphs or whole documents).
/// Exhaustive ranking: every indexed unit participates, so searches with
/// top_n >= N return the full corpus ordered by score then unit id.
class InvertedIndex {
 public:
  struct Posting {
    std::uint32_t unit;  // ordinal into unit_ids()
    std::uint32_t tf;
  };

  InvertedIndex() = default;

  /// Tokenizes with parm::tokenize, drops terms in `stopwords` (empty by
  /// default), and fixes unit ordinals in insertion order.
  static InvertedIndex build(const std::vector<std::pair<std::string, std::string>>& units,
                             Bm25Params params = {},
                             const std::unordered_set<std::string>& stopwords = {}) {
    if (params.k1 <= 0.0) fail("build_index: k1 must be positive");
    if (params.b < 0.0 || params.b > 1.0) fail("build_index: b must be in [0,1]");
    InvertedIndex idx;
    idx.params_ = params;
    idx.unit_ids_.reserve(units.size());
    idx.doc_lengths_.reserve(units.size());
    for (const auto& [unit_id, text] : units) {
      if (!idx.by_id_.emplace(unit_id, idx.unit_ids_.size()).second)
        fail("build_index: duplicate unit_id '" + unit_id + "'");
      auto ordinal = static_cast<std::uint32_t>(idx.unit_ids_.size());
      idx.unit_ids_.push_back(unit_id);
      std::map<std::string, std::uint32_t> counts;
      std::uint32_t dl = 0;
      for (auto& term : tokenize(text)) {
        if (stopwords.count(term)) continue;
        ++counts[term];
        ++dl;
      }
      idx.doc_lengths_.push_back(dl);
      for (auto& [term, tf] : counts) idx.postings_[term].push_back({ordinal, tf});
    }
    idx.recompute_avg_dl();
    return idx;
  }

  std::size_t size() const { return unit_ids_.size(); }
  double avg_dl() const { return avg_dl_; }
  const Bm25Params& params() const { return params_; }
  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  bool has_unit(const std::string& unit_id) const { return by_id_.count(unit_id) > 0; }

  std::uint32_t doc_length(const std::string& unit_id) const {
    return doc_lengths_[ordinal_of(unit_id)];
  }

  std::uint32_t df(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
  }

  /// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
  double idf(const std::string& term) const {
    double d = df(term);
    double n = static_cast<double>(size());
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
  }

  /// BM25 score of one unit against a bag of query terms; duplicated query
  /// terms contribute once per occurrence.
  double score(const std::vector<std::string>& query_terms, const std::string& unit_id) const {
    std::uint32_t ordinal = ordinal_of(unit_id);
    double total = 0.0;
    for (const auto& term : query_terms) total += term_score(term, ordinal);
    return total;
  }

  /// Exhaustive top_n search. Every indexed unit is a candidate (zero
  /// scores included), ties broken by ascending unit_id.
  RankedList search(const std::string& query_text, std::size_t top_n,
                    const std::unordered_set<std::string>* exclude_units = nullptr,
                    std::string query_id = {}) const {
    return search_terms(tokenize(query_text), top_n, exclude_units, std::move(query_id));
  }

  RankedList search_terms(const std::vector<std::string>& query_terms, std::size_t top_n,
                          const std::unordered_set<std::string>* exclude_units = nullptr,
                          std::string query_id = {}) const {
    if (top_n < 1) fail("search: top_n must be >= 1");
    // term-at-a-time accumulation; per-unit sums run in query-term order,
    // so scores do not depend on corpus insertion order
    std::vector<double> acc(size(), 0.0);
    for (const auto& term : query_terms) {
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      double w = idf(term);
      for (const auto& p : it->second)
        acc[p.unit] += w * tf_norm(p.tf, doc_lengths_[p.unit]);
    }
    std::vector<RankedEntry> pool;
    pool.reserve(size());
    for (std::size_t u = 0; u < size(); ++u) {
      if (exclude_units && exclude_units->count(unit_ids_[u])) continue;
      pool.push_back({unit_ids_[u], acc[u], 0});
    }
    return make_ranked_list(std::move(query_id), std::move(pool), top_n);
  }

  // --- persistence: magic PARMIDX, version u32, little-endian throughout ---

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write index file: " + path);
    out.write("PARMIDX", 7);
    detail::put_u32(out, 1);
    detail::put_f64(out, params_.k1);
    detail::put_f64(out, params_.b);
    detail::put_u32(out, static_cast<std::uint32_t>(size()));
    for (std::size_t u = 0; u < size(); ++u) {
      if (unit_ids_[u].size() > 0xffff) fail("unit_id too long: " + unit_ids_[u]);
      detail::put_u16(out, static_cast<std::uint16_t>(unit_ids_[u].size()));
      out.write(unit_ids_[u].data(), static_cast<std::streamsize>(unit_ids_[u].size()));
      detail::put_u32(out, doc_lengths_[u]);
    }
    detail::put_u32(out, static_cast<std::uint32_t>(postings_.size()));
    // std::map keeps the term dictionary sorted, so files are reproducible
    for (const auto& [term, plist] : postings_) {
      if (term.size() > 0xffff) fail("term too long: " + term);
      detail::put_u16(out, static_cast<std::uint16_t>(term.size()));
      out.write(term.data(), static_cast<std::streamsize>(term.size()));
      detail::put_u32(out, static_cast<std::uint32_t>(plist.size()));
      for (const auto& p : plist) {
        detail::put_u32(out, p.unit);
        detail::put_u32(out, p.tf);
      }
    }
    if (!out) fail("write failed: " + path);
  }

  static InvertedIndex load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open index file: " + path);
    char magic[7];
    if (!in.read(magic, 7) || std::string_view(magic, 7) != "PARMIDX")
      fail("not a PARMIDX file: " + path);
    auto version = detail::get_u32(in, path);
    if (version != 1) fail("unsupported PARMIDX version " + std::to_string(version));
    InvertedIndex idx;
    idx.params_.k1 = detail::get_f64(in, path);
    idx.params_.b = detail::get_f64(in, path);
    auto n = detail::get_u32(in, path);
    idx.unit_ids_.reserve(n);
    idx.doc_lengths_.reserve(n);
    for (std::uint32_t u = 0; u < n; ++u) {
      auto len = detail::get_u16(in, path);
      auto id = detail::get_str(in, len, path);
      if (!idx.by_id_.emplace(id, idx.unit_ids_.size()).second)
        fail(path + ": duplicate unit_id '" + id + "'");
      idx.unit_ids_.push_back(std::move(id));
      idx.doc_lengths_.push_back(detail::get_u32(in, path));
    }
    auto n_terms = detail::get_u32(in, path);
    for (std::uint32_t t = 0; t < n_terms; ++t) {
      auto len = detail::get_u16(in, path);
      auto term = detail::get_str(in, len, path);
      auto n_post = detail::get_u32(in, path);
      auto& plist = idx.postings_[term];
      plist.reserve(n_post);
      for (std::uint32_t i = 0; i < n_post; ++i) {
        auto unit = detail::get_u32(in, path);
        auto tf = detail::get_u32(in, path);
        if (unit >= n) fail(path + ": posting references unknown unit ordinal");
        plist.push_back({unit, tf});
      }
    }
    idx.recompute_avg_dl();
    return idx;
  }

 private:
  std::uint32_t ordinal_of(const std::string& unit_id) const {
    auto it = by_id_.find(unit_id);
    if (it == by_id_.end()) fail("unknown unit_id: " + unit_id);
    return static_cast<std::uint32_t>(it->second);
  }

  double tf_norm(double tf, double dl) const {
    double norm = 1.0 - params_.b + params_.b * (avg_dl_ > 0.0 ? dl / avg_dl_ : 0.0);
    return tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
  }

  double term_score(const std::string& term, std::uint32_t ordinal) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return 0.0;
    for (const auto& p : it->second)
      if (p.unit == ordinal) return idf(term) * tf_norm(p.tf, doc_lengths_[ordinal]);
    return 0.0;
  }

  void recompute_avg_dl() {
    avg_dl_ = 0.0;
    if (doc_lengths_.empty()) return;
    double sum = 0.0;
    for (auto dl : doc_lengths_) sum += dl;
    avg_dl_ = sum / static_cast<double>(doc_lengths_.size());
  }

  std::vector<std::string> unit_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> by_id_;
  double avg_dl_ = 0.0;
  Bm25Params params_;
};

}  // namespace parm
