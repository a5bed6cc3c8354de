#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "parm/core.hpp"
#include "parm/lexical.hpp"  // little-endian read/write helpers
#include "parm/ranked.hpp"

namespace parm {

/// Dot product accumulated in double precision regardless of input width.
template <typename A, typename B>
inline double dot(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size())
    fail("dot: length mismatch (" + std::to_string(a.size()) + " vs " +
         std::to_string(b.size()) + ")");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

inline double dot(const std::vector<float>& a, const std::vector<float>& b) {
  return dot<float, float>(a, b);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return dot<double, double>(a, b);
}

/// Fixed-dimension map unit_id -> dense vector; the substrate of dense
/// retrieval. Search is exact brute force over all stored vectors.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::uint32_t dim = 0, std::string tag = {})
      : dim_(dim), tag_(std::move(tag)) {}

  void add(const std::string& unit_id, std::span<const float> vec) {
    if (vec.size() != dim_)
      fail("EmbeddingStore: vector for '" + unit_id + "' has dim " +
           std::to_string(vec.size()) + ", store dim " + std::to_string(dim_));
    for (float x : vec)
      if (!std::isfinite(x)) fail("EmbeddingStore: non-finite component in '" + unit_id + "'");
    if (!by_id_.emplace(unit_id, ids_.size()).second)
      fail("EmbeddingStore: duplicate unit_id '" + unit_id + "'");
    ids_.push_back(unit_id);
    data_.insert(data_.end(), vec.begin(), vec.end());
  }

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }
  const std::vector<std::string>& ids() const { return ids_; }
  bool contains(const std::string& unit_id) const { return by_id_.count(unit_id) > 0; }

  std::span<const float> vector(const std::string& unit_id) const {
    auto it = by_id_.find(unit_id);
    if (it == by_id_.end()) fail("EmbeddingStore: unknown unit_id '" + unit_id + "'");
    return vector_at(it->second);
  }

  std::span<const float> vector_at(std::size_t ordinal) const {
    return {data_.data() + ordinal * dim_, dim_};
  }

  /// Exact top_n by dot product over all stored vectors, skipping units
  /// whose parent doc_id is in `exclude_docs`. Ties break by unit_id.
  RankedList search(std::span<const float> query, std::size_t top_n,
                    const std::unordered_set<std::string>* exclude_docs = nullptr,
                    std::string query_id = {}) const {
    if (query.size() != dim_)
      fail("search: query dim " + std::to_string(query.size()) + " != store dim " +
           std::to_string(dim_));
    if (top_n < 1) fail("search: top_n must be >= 1");
    std::vector<RankedEntry> pool;
    pool.reserve(size());
    for (std::size_t u = 0; u < size(); ++u) {
      if (exclude_docs && exclude_docs->count(parent_doc_id(ids_[u]))) continue;
      pool.push_back({ids_[u], dot<float, float>(vector_at(u), query), 0});
    }
    return make_ranked_list(std::move(query_id), std::move(pool), top_n);
  }

  // --- persistence: magic PARMVEC, u32 version=1, u32 dim, then records of
  // u16 id length, UTF-8 id, dim f32 little-endian ---

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write embedding file: " + path);
    out.write("PARMVEC", 7);
    detail::put_u32(out, 1);
    detail::put_u32(out, dim_);
    for (std::size_t u = 0; u < size(); ++u) {
      if (ids_[u].size() > 0xffff) fail("unit_id too long: " + ids_[u]);
      detail::put_u16(out, static_cast<std::uint16_t>(ids_[u].size()));
      out.write(ids_[u].data(), static_cast<std::streamsize>(ids_[u].size()));
      for (float x : vector_at(u)) {
        std::uint32_t bits;
        std::memcpy(&bits, &x, 4);
        detail::put_u32(out, bits);
      }
    }
    if (!out) fail("write failed: " + path);
  }

  static EmbeddingStore load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open embedding file: " + path);
    char magic[7];
    if (!in.read(magic, 7) || std::string_view(magic, 7) != "PARMVEC")
      fail("not a PARMVEC file: " + path);
    auto version = detail::get_u32(in, path);
    if (version != 1) fail("unsupported PARMVEC version " + std::to_string(version));
    EmbeddingStore store(detail::get_u32(in, path));
    std::vector<float> vec(store.dim_);
    std::size_t record = 0;
    while (true) {
      int peek = in.peek();
      if (peek == std::char_traits<char>::eof()) break;
      auto len = detail::get_u16(in, path);
      auto id = detail::get_str(in, len, path);
      for (std::uint32_t i = 0; i < store.dim_; ++i) {
        auto bits = detail::get_u32(in, path + " record " + std::to_string(record));
        float x;
        std::memcpy(&x, &bits, 4);
        if (!std::isfinite(x))
          fail(path + ": non-finite component in record " + std::to_string(record) +
               " ('" + id + "')");
        vec[i] = x;
      }
      store.add(id, vec);
      ++record;
    }
    return store;
  }

  /// JSONL ingest: {"id": str, "vec": [..]}. Dimension fixed by the first
  /// record; later mismatches are reported with their record index.
  static EmbeddingStore ingest_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open embedding jsonl: " + path);
    EmbeddingStore store;
    std::string line;
    std::size_t line_no = 0, record = 0;
    std::vector<float> vec;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("vec") ||
          !j["id"].is_string() || !j["vec"].is_array())
        fail(path + ":" + std::to_string(line_no) + ": malformed embedding record");
      vec.clear();
      for (const auto& x : j["vec"]) {
        if (!x.is_number())
          fail(path + ":" + std::to_string(line_no) + ": non-numeric vector component");
        vec.push_back(x.get<float>());
      }
      if (record == 0) {
        store = EmbeddingStore(static_cast<std::uint32_t>(vec.size()));
      } else if (vec.size() != store.dim()) {
        fail(path + ": record " + std::to_string(record) + " has dim " +
             std::to_string(vec.size()) + ", expected " + std::to_string(store.dim()));
      }
      for (float x : vec)
        if (!std::isfinite(x))
          fail(path + ": non-finite component in record " + std::to_string(record));
      store.add(j["id"].get<std::string>(), vec);
      ++record;
    }
    return store;
  }

 private:
  std::uint32_t dim_;
  std::string tag_;
  std::vector<std::string> ids_;
  std::vector<float> data_;  // ids_.size() x dim_, row-major
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace parm
