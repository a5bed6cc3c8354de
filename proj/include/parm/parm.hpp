#pragma once

#include <fstream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "parm/corpus.hpp"
#include "parm/dense.hpp"
#include "parm/lexical.hpp"
#include "parm/ranked.hpp"

namespace parm {

/// One retrieved paragraph, annotated with the document that contains it
/// and the query paragraph (1-based list_index) that retrieved it.
struct ParagraphHit {
  std::string para_id;
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  int list_index = 0;
};

/// Per-query-paragraph ranked lists for one query document. A document may
/// occur several times inside one list (one hit per matching paragraph).
struct ParmResult {
  std::string query_doc_id;
  std::vector<std::string> query_para_ids;               // aligned with lists
  std::vector<std::vector<ParagraphHit>> per_paragraph_lists;
  std::vector<std::vector<float>> query_paragraph_vectors;  // dense mode only

  bool dense() const { return !query_paragraph_vectors.empty(); }
};

namespace detail {

inline std::vector<ParagraphHit> to_hits(const RankedList& list, int list_index) {
  std::vector<ParagraphHit> hits;
  hits.reserve(list.entries.size());
  for (const auto& e : list.entries)
    hits.push_back({e.unit_id, parent_doc_id(e.unit_id), e.rank, e.score, list_index});
  return hits;
}

}  // namespace detail

/// PARM retrieval, lexical mode: one BM25 search per query paragraph over
/// the paragraph index; hits are annotated with their parent documents.
inline ParmResult parm_retrieve(const std::vector<Paragraph>& query_paras,
                                const InvertedIndex& index, std::size_t top_n,
                                bool exclude_self) {
  if (query_paras.empty()) fail("parm_retrieve: query document has no paragraphs");
  ParmResult result;
  result.query_doc_id = query_paras.front().doc_id;

  std::unordered_set<std::string> exclude;
  if (exclude_self) {
    for (const auto& unit_id : index.unit_ids())
      if (owner_doc_id(unit_id) == result.query_doc_id) exclude.insert(unit_id);
  }
  for (std::size_t i = 0; i < query_paras.size(); ++i) {
    auto list = index.search(query_paras[i].text, top_n, exclude_self ? &exclude : nullptr,
                             query_paras[i].para_id);
    result.query_para_ids.push_back(query_paras[i].para_id);
    result.per_paragraph_lists.push_back(detail::to_hits(list, static_cast<int>(i) + 1));
  }
  return result;
}

/// PARM retrieval, dense mode: query paragraph vectors come from
/// query_store (typically the same store as the corpus).
inline ParmResult parm_retrieve(const std::vector<Paragraph>& query_paras,
                                const EmbeddingStore& corpus_store,
                                const EmbeddingStore& query_store, std::size_t top_n,
                                bool exclude_self) {
  if (query_paras.empty()) fail("parm_retrieve: query document has no paragraphs");
  ParmResult result;
  result.query_doc_id = query_paras.front().doc_id;

  std::unordered_set<std::string> exclude;
  if (exclude_self) exclude.insert(result.query_doc_id);
  for (std::size_t i = 0; i < query_paras.size(); ++i) {
    const auto& pid = query_paras[i].para_id;
    if (!query_store.contains(pid))
      fail("parm_retrieve: missing embedding for query paragraph '" + pid + "'");
    auto qvec = query_store.vector(pid);
    auto list = corpus_store.search(qvec, top_n, exclude_self ? &exclude : nullptr, pid);
    result.query_para_ids.push_back(pid);
    result.per_paragraph_lists.push_back(detail::to_hits(list, static_cast<int>(i) + 1));
    result.query_paragraph_vectors.emplace_back(qvec.begin(), qvec.end());
  }
  return result;
}

// --- document-level baselines --------------------------------------------
// FirstP scores candidate documents by their first paragraph against the
// query's first paragraph; MaxP by their best-scoring paragraph. The query
// side is the first query paragraph in both cases.

/// (doc_id, first paragraph text) pairs for building a FirstP index.
inline std::vector<std::pair<std::string, std::string>> first_paragraph_units(
    const std::vector<Paragraph>& paras) {
  std::vector<std::pair<std::string, std::string>> units;
  for (const auto& p : paras)
    if (para_index(p.para_id) == 0) units.emplace_back(p.doc_id, p.text);
  return units;
}

/// FirstP store: doc_id -> vector of that document's paragraph 0.
inline EmbeddingStore first_paragraph_store(const EmbeddingStore& para_store,
                                            const std::vector<Paragraph>& paras) {
  EmbeddingStore firstp(para_store.dim(), para_store.tag());
  for (const auto& p : paras) {
    if (para_index(p.para_id) != 0) continue;
    if (!para_store.contains(p.para_id))
      fail("first_paragraph_store: missing embedding for '" + p.para_id + "'");
    firstp.add(p.doc_id, para_store.vector(p.para_id));
  }
  return firstp;
}

inline RankedList doc_retrieve_firstp(const std::string& query_doc_id,
                                      const std::string& query_first_text,
                                      const InvertedIndex& firstp_index, std::size_t top_n,
                                      bool exclude_self = false) {
  std::unordered_set<std::string> exclude{query_doc_id};
  return firstp_index.search(query_first_text, top_n, exclude_self ? &exclude : nullptr,
                             query_doc_id);
}

inline RankedList doc_retrieve_firstp(const std::string& query_doc_id,
                                      std::span<const float> query_first_vec,
                                      const EmbeddingStore& firstp_store, std::size_t top_n,
                                      bool exclude_self = false) {
  std::unordered_set<std::string> exclude{query_doc_id};
  return firstp_store.search(query_first_vec, top_n, exclude_self ? &exclude : nullptr,
                             query_doc_id);
}

namespace detail {

/// Collapse a paragraph-level ranking to documents, keeping each
/// document's maximum paragraph score. The input is exhaustive, so the
/// first occurrence of a document carries its max.
inline RankedList max_pool_by_doc(const RankedList& para_list, std::string query_id,
                                  std::size_t top_n) {
  std::unordered_set<std::string> seen;
  std::vector<RankedEntry> pool;
  for (const auto& e : para_list.entries) {
    auto doc = owner_doc_id(e.unit_id);
    if (seen.insert(doc).second) pool.push_back({doc, e.score, 0});
  }
  return make_ranked_list(std::move(query_id), std::move(pool), top_n);
}

}  // namespace detail

inline RankedList doc_retrieve_maxp(const std::string& query_doc_id,
                                    const std::string& query_first_text,
                                    const InvertedIndex& para_index, std::size_t top_n,
                                    bool exclude_self = false) {
  std::unordered_set<std::string> exclude;
  if (exclude_self) {
    for (const auto& unit_id : para_index.unit_ids())
      if (owner_doc_id(unit_id) == query_doc_id) exclude.insert(unit_id);
  }
  auto all = para_index.search(query_first_text, para_index.size(),
                               exclude_self ? &exclude : nullptr, query_doc_id);
  return detail::max_pool_by_doc(all, query_doc_id, top_n);
}

inline RankedList doc_retrieve_maxp(const std::string& query_doc_id,
                                    std::span<const float> query_first_vec,
                                    const EmbeddingStore& para_store, std::size_t top_n,
                                    bool exclude_self = false) {
  std::unordered_set<std::string> exclude{query_doc_id};
  auto all = para_store.search(query_first_vec, para_store.size(),
                               exclude_self ? &exclude : nullptr, query_doc_id);
  return detail::max_pool_by_doc(all, query_doc_id, top_n);
}

// --- ParmResult JSONL persistence ------------------------------------------
// One query document per line; hands per-paragraph lists to the standalone
// `fuse` and `analyze heatmap` commands.

inline void save_parm_results(const std::vector<ParmResult>& results,
                              const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write parm result file: " + path);
  for (const auto& r : results) {
    nlohmann::json j;
    j["query_doc_id"] = r.query_doc_id;
    j["query_para_ids"] = r.query_para_ids;
    nlohmann::json lists = nlohmann::json::array();
    for (const auto& list : r.per_paragraph_lists) {
      nlohmann::json jl = nlohmann::json::array();
      for (const auto& h : list)
        jl.push_back({{"para_id", h.para_id}, {"rank", h.rank}, {"score", h.score}});
      lists.push_back(std::move(jl));
    }
    j["lists"] = std::move(lists);
    if (r.dense()) {
      nlohmann::json vecs = nlohmann::json::array();
      for (const auto& v : r.query_paragraph_vectors) {
        nlohmann::json jv = nlohmann::json::array();
        for (float x : v) jv.push_back(static_cast<double>(x));
        vecs.push_back(std::move(jv));
      }
      j["query_vecs"] = std::move(vecs);
    }
    out << j.dump() << '\n';
  }
}

inline std::vector<ParmResult> load_parm_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open parm result file: " + path);
  std::vector<ParmResult> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      fail(path + ":" + std::to_string(line_no) + ": malformed parm result line");
    ParmResult r;
    r.query_doc_id = j.at("query_doc_id").get<std::string>();
    r.query_para_ids = j.at("query_para_ids").get<std::vector<std::string>>();
    int list_index = 0;
    for (const auto& jl : j.at("lists")) {
      ++list_index;
      std::vector<ParagraphHit> hits;
      for (const auto& jh : jl) {
        ParagraphHit h;
        h.para_id = jh.at("para_id").get<std::string>();
        h.doc_id = parent_doc_id(h.para_id);
        h.rank = jh.at("rank").get<int>();
        h.score = jh.at("score").get<double>();
        h.list_index = list_index;
        hits.push_back(std::move(h));
      }
      r.per_paragraph_lists.push_back(std::move(hits));
    }
    if (j.contains("query_vecs"))
      for (const auto& jv : j["query_vecs"]) {
        std::vector<float> v;
        for (const auto& x : jv) v.push_back(x.get<float>());
        r.query_paragraph_vectors.push_back(std::move(v));
      }
    if (r.per_paragraph_lists.size() != r.query_para_ids.size())
      fail(path + ":" + std::to_string(line_no) + ": list/para count mismatch");
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace parm
