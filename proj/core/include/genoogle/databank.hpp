#pragma once

// Formatted sequence banks.
//
// A bank file ("GNDB", little-endian) holds every sequence of a FASTA source
// packed two bits per base, together with the per-sequence metadata table.
// Loading a bank reads only the header, the metadata table and the string
// heap; sequence payloads are fetched with positioned reads on demand, so a
// loaded Bank can be shared between threads without coordination.
//
//   "GNDB"  u16 version  u16 mask_len  mask bytes  u32 sequence_count  u64 total_bases
//   table:  sequence_count x { u32 length, u32 name_len, u32 desc_len,
//                              u64 name_offset, u64 desc_offset, u64 payload_offset }
//   heap:   u64 heap_size  u32 bank_name_len  heap bytes (bank name first)
//   payload (per sequence, at payload_offset):
//           u32 word_count  u8 trailing_bases  word_count x u32 packed words
//           ceil(length / 8) bytes ambiguity bitmap (bit i, LSB first, marks base i)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genoogle/encoding.hpp"

namespace genoogle {

inline constexpr std::uint16_t kBankFormatVersion = 1;

struct FastaRecord {
  std::string name;
  std::string description;
  std::string sequence;  // raw letters, whitespace removed
};

// Streaming FASTA parser. Accepts LF and CRLF line endings; the header name is
// the token up to the first whitespace and the description is the remainder.
class FastaReader {
 public:
  explicit FastaReader(std::istream& in) : in_(in) {}

  // Throws IngestError on sequence data before the first header.
  std::optional<FastaRecord> next();

 private:
  std::istream& in_;
  std::string pending_header_;
  bool have_header_ = false;
  std::size_t line_no_ = 0;
};

std::vector<FastaRecord> read_fasta(const std::filesystem::path& path);

struct SequenceMeta {
  std::uint32_t seq_id = 0;
  std::string name;
  std::string description;
  std::uint32_t length = 0;
  std::uint64_t payload_offset = 0;

  friend bool operator==(const SequenceMeta&, const SequenceMeta&) = default;
};

struct BankMeta {
  std::string bank_name;
  std::uint64_t total_bases = 0;
  std::uint32_t sequence_count = 0;
  std::string mask_pattern;
  std::vector<SequenceMeta> sequences;

  friend bool operator==(const BankMeta&, const BankMeta&) = default;
};

struct SequenceRecord {
  SequenceMeta meta;
  std::string bases;  // normalized; ambiguous positions hold kAmbiguousBase
};

// Accumulates records in ingestion order and writes one bank file.
class BankWriter {
 public:
  struct Limits {
    std::uint64_t max_sequences = std::uint64_t{1} << 32;
    std::uint64_t max_length = std::uint64_t{1} << 32;
  };

  BankWriter(std::string bank_name, SpacedSeedMask mask) : BankWriter(std::move(bank_name), std::move(mask), Limits{}) {}
  BankWriter(std::string bank_name, SpacedSeedMask mask, Limits limits);

  // Returns the bank-local id assigned to the record.
  std::uint32_t add(const FastaRecord& record);

  std::uint32_t sequence_count() const noexcept { return static_cast<std::uint32_t>(entries_.size()); }
  std::uint64_t total_bases() const noexcept { return total_bases_; }

  BankMeta write(const std::filesystem::path& path) const;

 private:
  struct Entry {
    std::string name;
    std::string description;
    std::uint32_t length;
    std::string payload;
  };

  std::string bank_name_;
  SpacedSeedMask mask_;
  Limits limits_;
  std::vector<Entry> entries_;
  std::uint64_t total_bases_ = 0;
};

// Reads every record of `fasta` into a new bank at `output_path`. An empty
// source, a record without sequence data or data before any header raise
// IngestError.
BankMeta format_bank(std::istream& fasta, const std::string& bank_name, const SpacedSeedMask& mask,
                     const std::filesystem::path& output_path);
BankMeta format_bank(const std::filesystem::path& fasta_path, const std::string& bank_name,
                     const SpacedSeedMask& mask, const std::filesystem::path& output_path);

// Read-only handle on a bank file. Move-only; owns the file descriptor.
class Bank {
 public:
  Bank(Bank&& other) noexcept;
  Bank& operator=(Bank&& other) noexcept;
  Bank(const Bank&) = delete;
  Bank& operator=(const Bank&) = delete;
  ~Bank();

  const BankMeta& meta() const noexcept { return meta_; }
  const SpacedSeedMask& mask() const noexcept { return mask_; }
  const std::filesystem::path& path() const noexcept { return path_; }
  std::uint32_t sequence_count() const noexcept { return meta_.sequence_count; }

  SequenceRecord get_sequence(std::uint32_t seq_id) const;
  // Only the normalized bases of get_sequence.
  std::string sequence_bases(std::uint32_t seq_id) const;

 private:
  friend Bank load_bank(const std::filesystem::path& path);
  Bank() = default;

  std::filesystem::path path_;
  int fd_ = -1;
  std::uint64_t file_size_ = 0;
  BankMeta meta_;
  SpacedSeedMask mask_;
};

// Throws FormatError on a bad magic or version, CorruptionError on truncation.
Bank load_bank(const std::filesystem::path& path);

// A length-m bank window. Windows containing a non-ACGT base are flagged and
// must not be indexed.
struct BankWindow {
  std::uint32_t position = 0;
  std::string bases;
  bool indexable = true;
};

// Non-overlapping windows at 0, m, 2m, ...; a trailing fragment shorter than m
// is not returned.
std::vector<BankWindow> bank_windows(const Bank& bank, std::uint32_t seq_id);

// Start positions of the indexable non-overlapping windows of `bases`.
template <typename Fn>
void for_each_bank_window(std::string_view bases, const SpacedSeedMask& mask, Fn&& fn) {
  const unsigned m = mask.window();
  for (std::size_t pos = 0; pos + m <= bases.size(); pos += m) {
    if (auto word = try_apply_mask(bases.substr(pos, m), mask))
      fn(static_cast<std::uint32_t>(pos), *word);
  }
}

struct IndexMemoryEstimate {
  std::uint64_t subsequences = 0;
  std::uint64_t bytes = 0;

  double mebibytes() const noexcept { return static_cast<double>(bytes) / (1024.0 * 1024.0); }
};

// floor(l / m) entries of 8 bytes plus 4^s bucket headers of 16 bytes.
IndexMemoryEstimate estimate_index_memory(std::uint64_t total_bases, unsigned window, unsigned weight);

}  // namespace genoogle
