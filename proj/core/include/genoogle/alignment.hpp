#pragma once

// Banded local alignment with a linear gap penalty.

#include <cstdint>
#include <string>
#include <string_view>

#include "genoogle/params.hpp"

namespace genoogle {

struct Hsp;

struct AlignmentResult {
  int score = 0;
  std::string query_aligned;  // '-' marks a gap
  std::string bank_aligned;
  std::string midline;        // '|' on identical bases, ' ' elsewhere
  // Aligned region in the coordinates of the inputs, half-open.
  std::uint32_t query_begin = 0;
  std::uint32_t query_end = 0;
  std::uint32_t bank_begin = 0;
  std::uint32_t bank_end = 0;

  bool empty() const noexcept { return query_aligned.empty(); }

  friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

// Substitution score; an ambiguous base never matches.
inline int substitution_score(char a, char b, const SearchParams& p) noexcept {
  return (a == b && a != 'N') ? p.match_score : p.mismatch_score;
}

// Smith-Waterman restricted to cells with |i - j| <= band_radius. Ties in the
// traceback prefer diagonal, then a gap in `b`, then a gap in `a`; the end
// cell is the first maximum in row-major order. Throws DomainError on empty
// input or a zero band.
AlignmentResult banded_smith_waterman(std::string_view a, std::string_view b, const SearchParams& params);

// Delegates to banded_smith_waterman when both inputs fit one segment.
// Otherwise both inputs are cut at the same offsets into segment_length
// pieces (the last piece takes the remainder), each piece pair is aligned
// end-to-end inside a band around its corner-to-corner diagonal, and the
// pieces are concatenated with their scores summed.
AlignmentResult segmented_align(std::string_view a, std::string_view b, const SearchParams& params);

// Aligns the HSP's query and bank slices; coordinates in the result are
// absolute. Throws DomainError when the HSP lies outside either sequence.
AlignmentResult align_hsp(std::string_view query, std::string_view bank_sequence, const Hsp& hsp,
                          const SearchParams& params);

// Score of an alignment recomputed from its texts.
int rescore_alignment(std::string_view query_aligned, std::string_view bank_aligned, const SearchParams& params);

std::string make_midline(std::string_view query_aligned, std::string_view bank_aligned);

}  // namespace genoogle
