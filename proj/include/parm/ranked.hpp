#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "parm/core.hpp"

namespace parm {

struct RankedEntry {
  std::string unit_id;
  double score = 0.0;
  int rank = 0;  // 1-based, contiguous
};

/// Ordered retrieval output for one query unit. Scores non-increasing,
/// ranks contiguous from 1, ties broken by ascending unit_id.
struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;
};

namespace detail {

inline bool score_then_id(const RankedEntry& a, const RankedEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.unit_id < b.unit_id;
}

}  // namespace detail

/// Select the top_n highest-scoring entries (all of them if the pool is
/// smaller), sort with the deterministic tie-break and assign ranks.
inline RankedList make_ranked_list(std::string query_id, std::vector<RankedEntry> pool,
                                   std::size_t top_n) {
  if (top_n < pool.size()) {
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(top_n),
                      pool.end(), detail::score_then_id);
    pool.resize(top_n);
  } else {
    std::sort(pool.begin(), pool.end(), detail::score_then_id);
  }
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].rank = static_cast<int>(i) + 1;
  return {std::move(query_id), std::move(pool)};
}

/// Check the RankedList invariants; throws on violation.
inline void validate(const RankedList& list) {
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    if (e.rank != static_cast<int>(i) + 1)
      fail("RankedList '" + list.query_id + "': ranks not contiguous at " + std::to_string(i));
    if (i > 0) {
      const auto& prev = list.entries[i - 1];
      if (prev.score < e.score)
        fail("RankedList '" + list.query_id + "': scores increase at rank " +
             std::to_string(e.rank));
      if (prev.score == e.score && !(prev.unit_id < e.unit_id))
        fail("RankedList '" + list.query_id + "': tie-break violated at rank " +
             std::to_string(e.rank));
    }
  }
}

}  // namespace parm
