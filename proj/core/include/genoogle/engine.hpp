#pragma once

// Fragmented banks and the parallel search driver.
//
// A bank formatted with f fragments lives in one directory:
//   <name>.gnfm          manifest: fragment -> global sequence ids
//   <name>.<i>.gndb      fragment bank i
//   <name>.<i>.gnix      inverted index of fragment i
//
// Manifest ("GNFM", little-endian): u16 version, u32 fragment_count,
// u32 sequence_count, then per fragment u32 count followed by count u32
// global ids in local id order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "genoogle/databank.hpp"
#include "genoogle/inverted_index.hpp"
#include "genoogle/search.hpp"

namespace genoogle {

inline constexpr std::uint16_t kManifestFormatVersion = 1;

struct EngineConfig {
  std::uint32_t bank_fragments = 1;  // fixed when the bank is formatted
  std::uint32_t query_splits = 1;
  std::uint32_t align_workers = 1;

  // Throws ConfigError unless every count is at least 1.
  void validate() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

struct Fragment {
  Bank bank;
  InvertedIndex index;
  std::vector<std::uint32_t> global_ids;  // local seq_id -> global seq_id
};

struct FragmentLayout {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> banks;
  std::vector<std::filesystem::path> indexes;
};

FragmentLayout fragment_layout(const std::filesystem::path& dir, const std::string& bank_name, std::uint32_t fragments);

// Splits the FASTA records over `fragments` banks, each sequence going to the
// fragment with the fewest bases so far (lowest index on ties), then builds
// and saves one index per fragment. Global ids follow FASTA order.
FragmentLayout fragment_bank(const std::filesystem::path& fasta_path, std::uint32_t fragments,
                             const SpacedSeedMask& mask, const std::filesystem::path& output_dir,
                             const std::string& bank_name, const IndexBuildOptions& options = {});
FragmentLayout fragment_bank(std::istream& fasta, std::uint32_t fragments, const SpacedSeedMask& mask,
                             const std::filesystem::path& output_dir, const std::string& bank_name,
                             const IndexBuildOptions& options = {});

struct BankSummary {
  std::uint32_t fragments = 0;
  std::uint32_t sequence_count = 0;
  std::uint64_t total_bases = 0;
};

// Reads the manifest and fragment metadata only; indexes are not loaded.
BankSummary summarize_bank(const std::filesystem::path& dir, const std::string& bank_name);

// A loaded, immutable set of fragments searched as one bank.
class Engine {
 public:
  // Loads every fragment and index and checks their provenance.
  static Engine open(const std::filesystem::path& dir, const std::string& bank_name);

  const std::string& bank_name() const noexcept { return bank_name_; }
  const SpacedSeedMask& mask() const noexcept { return fragments_.front().bank.mask(); }
  std::uint64_t total_bases() const noexcept { return total_bases_; }
  std::uint32_t sequence_count() const noexcept { return static_cast<std::uint32_t>(locations_.size()); }
  std::uint32_t fragment_count() const noexcept { return static_cast<std::uint32_t>(fragments_.size()); }
  const Fragment& fragment(std::uint32_t i) const { return fragments_.at(i); }

  // Throws NotFoundError for an unknown global id.
  const SequenceMeta& sequence_meta(std::uint32_t global_id) const;
  std::string sequence_bases(std::uint32_t global_id) const;

 private:
  struct Location {
    std::uint32_t fragment;
    std::uint32_t local_id;
  };

  std::string bank_name_;
  std::vector<Fragment> fragments_;
  std::vector<Location> locations_;
  std::uint64_t total_bases_ = 0;
};

struct SubInput {
  std::uint32_t offset = 0;  // absolute position of bases[0] in the query
  std::string_view bases;
};

// Near-equal contiguous pieces whose neighbours overlap by m - 1 bases, so each
// window start of the query belongs to exactly one piece. Falls back to fewer
// pieces when the query has fewer than k windows.
std::vector<SubInput> split_query(std::string_view query, std::uint32_t k, unsigned window);

struct ParallelStats {
  std::size_t index_tasks = 0;
  std::size_t extension_items = 0;
  std::size_t align_enqueued = 0;
  std::size_t align_dequeued = 0;
  std::size_t align_executed = 0;
};

// fragment_count() x query_splits index-search tasks deposit hits into a
// shared collection; hits of one bank sequence are merged and chained, the
// candidates extended by the worker pool, overlaps merged, the longest
// selected and queued for alignment on the same pool. Produces the same
// result as search().
SearchResult parallel_search(const Engine& engine, std::string_view query, const std::string& query_id,
                             const SearchParams& params, const EngineConfig& config, ParallelStats* stats = nullptr);

}  // namespace genoogle
