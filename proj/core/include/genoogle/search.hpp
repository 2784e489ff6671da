#pragma once

// The sequential search pipeline.
//
//   query -> overlapped masked words -> index hits per bank sequence
//         -> chained areas -> length filter -> HSPs -> X-drop extension
//         -> overlap merge -> top-N by length -> banded alignment -> sort by score

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genoogle/alignment.hpp"
#include "genoogle/encoding.hpp"
#include "genoogle/inverted_index.hpp"
#include "genoogle/params.hpp"

namespace genoogle {

class Engine;

struct QueryWord {
  std::uint32_t query_pos = 0;
  EncodedWord word;

  friend bool operator==(const QueryWord&, const QueryWord&) = default;
};

// One masked word per window start 0, 1, ..., len - m; windows holding an
// ambiguous base are skipped. Positions are reported as `offset + start` so
// sub-inputs of a split query keep absolute coordinates.
// Throws QueryTooShortError when query.size() < m.
std::vector<QueryWord> process_query(std::string_view query, const SpacedSeedMask& mask, std::uint32_t offset = 0);

struct Hit {
  std::uint32_t query_pos = 0;
  std::uint32_t bank_pos = 0;

  friend auto operator<=>(const Hit& a, const Hit& b) {
    if (auto c = a.bank_pos <=> b.bank_pos; c != 0) return c;
    return a.query_pos <=> b.query_pos;
  }
  friend bool operator==(const Hit&, const Hit&) = default;
};

struct SequenceHits {
  std::uint32_t seq_id = 0;
  std::vector<Hit> hits;  // ordered by bank_pos, then query_pos
};

// Hits grouped by bank-local seq_id, groups in ascending seq_id.
std::vector<SequenceHits> retrieve_hits(const InvertedIndex& index, std::span<const QueryWord> words);

// A rectangle [query_start, query_end) x [bank_start, bank_end).
struct Area {
  std::uint32_t query_start = 0;
  std::uint32_t query_end = 0;
  std::uint32_t bank_start = 0;
  std::uint32_t bank_end = 0;

  friend bool operator==(const Area&, const Area&) = default;
};

// Greedy single pass over hits ordered by (bank_pos, query_pos). A hit joins
// the open chain when its bank and query distances from the chain's last hit
// and its diagonal drift from the chain's first hit are all within
// max_entry_distance; otherwise it opens a new chain.
std::vector<Area> chain_hits(std::span<const Hit> hits, unsigned window, const SearchParams& params);

struct Hsp {
  std::uint32_t seq_id = 0;
  std::uint32_t query_start = 0;
  std::uint32_t query_end = 0;
  std::uint32_t bank_start = 0;
  std::uint32_t bank_end = 0;

  // The smaller of the two spans.
  std::uint32_t length() const noexcept {
    return std::min(query_end - query_start, bank_end - bank_start);
  }

  friend auto operator<=>(const Hsp&, const Hsp&) = default;
};

std::vector<Hsp> filter_hsps(std::uint32_t seq_id, std::span<const Area> areas, const SearchParams& params);

// Ungapped X-drop extension of both ends. Never shrinks the input interval.
Hsp extend_hsp(std::string_view query, std::string_view bank_sequence, const Hsp& hsp, const SearchParams& params);

// Merges HSPs whose query intervals and bank intervals both overlap into their
// bounding box, repeated until no two HSPs overlap. Input must share one seq_id.
std::vector<Hsp> merge_overlapping(std::vector<Hsp> hsps);

// Sort by length descending, ties by (seq_id, bank_start, query_start, ...)
// ascending; keep the first max_results (all when max_results == 0).
std::vector<Hsp> select_top(std::vector<Hsp> hsps, const SearchParams& params);

struct HspStatistics {
  double bit_score = 0;
  double e_value = 0;
};

// Karlin-Altschul form: bits = (lambda*S - ln K) / ln 2, E = K * m * n * exp(-lambda*S).
// Throws ConfigError for nonpositive lambda or K.
HspStatistics score_hsp(double raw_score, std::uint64_t query_length, std::uint64_t bank_bases,
                        const SearchParams& params);

struct ResultHsp {
  std::uint32_t seq_id = 0;
  int raw_score = 0;
  double bit_score = 0;
  double e_value = 0;
  // Aligned region, 0-based half-open, absolute coordinates.
  std::uint32_t query_begin = 0;
  std::uint32_t query_end = 0;
  std::uint32_t bank_begin = 0;
  std::uint32_t bank_end = 0;
  std::string query_aligned;
  std::string midline;
  std::string bank_aligned;

  friend bool operator==(const ResultHsp&, const ResultHsp&) = default;
};

struct ResultSubject {
  std::uint32_t seq_id = 0;
  std::string name;
  std::string description;

  friend bool operator==(const ResultSubject&, const ResultSubject&) = default;
};

struct SearchResult {
  std::string bank_name;
  std::string query_id;
  std::uint32_t query_length = 0;
  SearchParams params;
  // Subjects in order of their first HSP in `hsps`.
  std::vector<ResultSubject> subjects;
  // Raw score descending, then e-value ascending, then (seq_id, bank_begin, ...).
  std::vector<ResultHsp> hsps;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Sorts HSPs into result order: raw score descending, e-value ascending, then
// (seq_id, bank_begin, query_begin, bank_end, query_end) ascending.
void order_result_hsps(std::vector<ResultHsp>& hsps);

// Runs every phase in the calling thread over all fragments of `engine`.
// `query` is raw sequence text; it is normalized first.
SearchResult search(const Engine& engine, std::string_view query, const std::string& query_id,
                    const SearchParams& params);

namespace pipeline {

// Pieces shared by the sequential and parallel drivers so both produce
// identical results.

// Sorts the hits and runs chain_hits + filter_hsps.
std::vector<Hsp> candidate_hsps(std::uint32_t seq_id, std::vector<Hit> hits, unsigned window,
                                const SearchParams& params);

// Aligns and scores one selected HSP; returns false when the alignment is empty.
bool finish_hsp(std::string_view query, std::string_view bank_sequence, const Hsp& hsp,
                std::uint64_t bank_bases, const SearchParams& params, ResultHsp& out);

// Sorts `hsps` into result order and fills the subject table from `engine`.
SearchResult assemble(const Engine& engine, const std::string& query_id, std::uint32_t query_length,
                      const SearchParams& params, std::vector<ResultHsp> hsps);

}  // namespace pipeline

}  // namespace genoogle
