#pragma once

#include <cstdint>

namespace genoogle {

class SpacedSeedMask;

// Run-time search parameters. Distances and lengths are in bases, scores in
// raw score units.
struct SearchParams {
  std::uint32_t max_entry_distance = 72;  // merge radius for index hits
  std::uint32_t min_hsp_length = 18;
  std::int32_t extension_dropoff = 20;
  std::uint32_t max_results = 20;  // 0 returns every HSP
  std::int32_t match_score = 1;
  std::int32_t mismatch_score = -3;
  std::int32_t gap_score = -5;  // per gap character
  std::uint32_t band_radius = 16;
  std::uint32_t segment_length = 2000;
  double evalue_lambda = 1.33;
  double evalue_k = 0.621;

  // Throws ConfigError when an invariant is violated for `mask`.
  void validate(const SpacedSeedMask& mask) const;
  // The mask-independent subset of validate().
  void validate() const;

  friend bool operator==(const SearchParams&, const SearchParams&) = default;
};

}  // namespace genoogle
