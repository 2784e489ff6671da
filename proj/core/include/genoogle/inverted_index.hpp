#pragma once

// Directly addressed inverted index: one bucket per possible masked word value,
// each bucket listing the (sequence, position) occurrences of that word.
//
// On disk ("GNIX", little-endian):
//   "GNIX"  u16 version  u8 weight  u16 mask_len  mask bytes  u16 name_len  bank name
//   directory: 4^weight x { u64 first_entry, u32 count }   (empty bucket: 0, 0)
//   entries:   { u32 seq_id, u32 position } in bucket order

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "genoogle/encoding.hpp"

namespace genoogle {

class Bank;

inline constexpr std::uint16_t kIndexFormatVersion = 1;

struct IndexEntry {
  std::uint32_t seq_id = 0;
  std::uint32_t position = 0;

  friend auto operator<=>(const IndexEntry&, const IndexEntry&) = default;
};

class InvertedIndex {
 public:
  InvertedIndex() = default;
  // `offsets` has 4^weight + 1 elements; bucket v spans entries[offsets[v], offsets[v+1]).
  InvertedIndex(SpacedSeedMask mask, std::string bank_name, std::vector<std::uint64_t> offsets,
                std::vector<IndexEntry> entries);

  const SpacedSeedMask& mask() const noexcept { return mask_; }
  const std::string& bank_name() const noexcept { return bank_name_; }
  unsigned weight() const noexcept { return mask_.weight(); }
  std::uint64_t bucket_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::uint64_t entry_count() const noexcept { return entries_.size(); }

  // Throws DomainError if word.length != weight().
  std::span<const IndexEntry> lookup(EncodedWord word) const;
  std::span<const IndexEntry> bucket(std::uint32_t value) const noexcept {
    return {entries_.data() + offsets_[value], entries_.data() + offsets_[value + 1]};
  }

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  SpacedSeedMask mask_;
  std::string bank_name_;
  std::vector<std::uint64_t> offsets_;
  std::vector<IndexEntry> entries_;
};

struct IndexBuildOptions {
  // Occurrence triples held in memory before a sorted run is spilled to disk.
  std::size_t run_capacity = std::size_t{1} << 24;
  std::filesystem::path temp_dir = std::filesystem::temp_directory_path();
};

// Sort-based construction: every indexable window yields a (word, seq_id,
// position) triple; triples are sorted (spilling to temporary runs merged
// k-way when they exceed run_capacity) and grouped into buckets.
// Throws ProvenanceError when `mask` differs from the bank's mask.
InvertedIndex build_index(const Bank& bank, const SpacedSeedMask& mask, const IndexBuildOptions& options = {});

void save_index(const InvertedIndex& index, const std::filesystem::path& path);
InvertedIndex load_index(const std::filesystem::path& path);

// Throws ProvenanceError unless the index was built from this bank with its mask.
void check_provenance(const InvertedIndex& index, const Bank& bank);

}  // namespace genoogle
