#include "genoogle/inverted_index.hpp"

#include <algorithm>
#include <memory>
#include <atomic>
#include <fstream>
#include <queue>
#include <random>

#include <unistd.h>

#include "binary_io.hpp"
#include "genoogle/databank.hpp"
#include "genoogle/errors.hpp"

namespace genoogle {

namespace {

constexpr std::string_view kIndexMagic = "GNIX";
constexpr std::size_t kDirectoryRecordSize = 8 + 4;

struct Triple {
  std::uint32_t word;
  IndexEntry entry;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// A sorted run of triples spilled to a temporary file, removed on destruction.
class SpilledRun {
 public:
  SpilledRun(const std::filesystem::path& dir, std::span<const Triple> triples) {
    static std::atomic<unsigned> counter{0};
    path_ = dir / ("genoogle-run-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                   std::to_string(std::random_device{}()) + ".tmp");
    detail::ByteWriter w;
    for (const auto& t : triples) {
      w.u32(t.word);
      w.u32(t.entry.seq_id);
      w.u32(t.entry.position);
    }
    detail::write_file(path_, w.buffer());
  }
  SpilledRun(const SpilledRun&) = delete;
  SpilledRun& operator=(const SpilledRun&) = delete;
  ~SpilledRun() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

class RunCursor {
 public:
  explicit RunCursor(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot reopen index run " + path.string());
    advance();
  }

  bool done() const noexcept { return done_; }
  const Triple& current() const noexcept { return current_; }

  void advance() {
    char buf[12];
    if (!in_.read(buf, sizeof buf)) {
      done_ = true;
      return;
    }
    current_ = {detail::load_u32(buf), {detail::load_u32(buf + 4), detail::load_u32(buf + 8)}};
  }

 private:
  std::ifstream in_;
  Triple current_{};
  bool done_ = false;
};

InvertedIndex group_sorted(const SpacedSeedMask& mask, const std::string& bank_name, std::vector<Triple> sorted) {
  const std::uint64_t buckets = std::uint64_t{1} << (2 * mask.weight());
  std::vector<std::uint64_t> offsets(buckets + 1, 0);
  std::vector<IndexEntry> entries;
  entries.reserve(sorted.size());
  for (const auto& t : sorted) {
    ++offsets[t.word + 1];
    entries.push_back(t.entry);
  }
  for (std::uint64_t v = 0; v < buckets; ++v) offsets[v + 1] += offsets[v];
  return InvertedIndex(mask, bank_name, std::move(offsets), std::move(entries));
}

}  // namespace

InvertedIndex::InvertedIndex(SpacedSeedMask mask, std::string bank_name, std::vector<std::uint64_t> offsets,
                             std::vector<IndexEntry> entries)
    : mask_(std::move(mask)), bank_name_(std::move(bank_name)), offsets_(std::move(offsets)), entries_(std::move(entries)) {
  const std::uint64_t buckets = std::uint64_t{1} << (2 * mask_.weight());
  if (offsets_.size() != buckets + 1 || offsets_.back() != entries_.size())
    throw CorruptionError("inverted index directory does not match its entries");
}

std::span<const IndexEntry> InvertedIndex::lookup(EncodedWord word) const {
  if (word.length != weight())
    throw DomainError("lookup word of length " + std::to_string(word.length) + " in an index of weight " +
                      std::to_string(weight()));
  return bucket(word.value);
}

InvertedIndex build_index(const Bank& bank, const SpacedSeedMask& mask, const IndexBuildOptions& options) {
  if (!(mask == bank.mask()))
    throw ProvenanceError("bank " + bank.meta().bank_name + " was formatted with mask " + bank.mask().pattern() +
                          ", not " + mask.pattern());
  const std::size_t capacity = std::max<std::size_t>(options.run_capacity, 1);

  std::vector<Triple> buffer;
  std::vector<std::unique_ptr<SpilledRun>> runs;
  auto spill = [&] {
    std::sort(buffer.begin(), buffer.end());
    runs.push_back(std::make_unique<SpilledRun>(options.temp_dir, buffer));
    buffer.clear();
  };

  for (std::uint32_t id = 0; id < bank.sequence_count(); ++id) {
    const std::string bases = bank.sequence_bases(id);
    for_each_bank_window(bases, mask, [&](std::uint32_t pos, EncodedWord word) {
      buffer.push_back({word.value, {id, pos}});
      if (buffer.size() >= capacity) spill();
    });
  }

  if (runs.empty()) {
    std::sort(buffer.begin(), buffer.end());
    return group_sorted(mask, bank.meta().bank_name, std::move(buffer));
  }
  if (!buffer.empty()) spill();

  std::vector<RunCursor> cursors;
  cursors.reserve(runs.size());
  for (const auto& run : runs) cursors.emplace_back(run->path());
  auto greater = [&](std::size_t a, std::size_t b) { return cursors[b].current() < cursors[a].current(); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> heap(greater);
  for (std::size_t i = 0; i < cursors.size(); ++i)
    if (!cursors[i].done()) heap.push(i);

  std::vector<Triple> merged;
  while (!heap.empty()) {
    const std::size_t i = heap.top();
    heap.pop();
    merged.push_back(cursors[i].current());
    cursors[i].advance();
    if (!cursors[i].done()) heap.push(i);
  }
  return group_sorted(mask, bank.meta().bank_name, std::move(merged));
}

void save_index(const InvertedIndex& index, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.bytes(kIndexMagic);
  w.u16(kIndexFormatVersion);
  w.u8(static_cast<std::uint8_t>(index.weight()));
  w.short_string(index.mask().pattern());
  w.short_string(index.bank_name());
  w.buffer().reserve(w.size() + index.bucket_count() * kDirectoryRecordSize + index.entry_count() * 8);
  std::uint64_t first = 0;
  for (std::uint64_t v = 0; v < index.bucket_count(); ++v) {
    const auto count = index.bucket(static_cast<std::uint32_t>(v)).size();
    w.u64(count == 0 ? 0 : first);
    w.u32(static_cast<std::uint32_t>(count));
    first += count;
  }
  for (std::uint64_t v = 0; v < index.bucket_count(); ++v) {
    for (const auto& e : index.bucket(static_cast<std::uint32_t>(v))) {
      w.u32(e.seq_id);
      w.u32(e.position);
    }
  }
  detail::write_file(path, w.buffer());
}

InvertedIndex load_index(const std::filesystem::path& path) {
  const std::string data = detail::read_file(path);
  const std::string what = "index " + path.string();
  detail::ByteReader r(data, what);
  if (r.remaining() < 4 || r.bytes(4) != kIndexMagic) throw FormatError(what + ": bad magic");
  const auto version = r.u16();
  if (version != kIndexFormatVersion)
    throw FormatError(what + ": unsupported format version " + std::to_string(version));
  const unsigned weight = r.u8();
  const std::string pattern = r.short_string();
  const std::string bank_name = r.short_string();
  SpacedSeedMask mask;
  try {
    mask = parse_mask(pattern);
  } catch (const MaskFormatError& e) {
    throw CorruptionError(what + ": " + e.what());
  }
  if (mask.weight() != weight) throw CorruptionError(what + ": weight does not match mask");

  const std::uint64_t buckets = std::uint64_t{1} << (2 * weight);
  const auto directory = r.bytes(buckets * kDirectoryRecordSize);
  std::vector<std::uint64_t> offsets(buckets + 1, 0);
  std::uint64_t total = 0;
  for (std::uint64_t v = 0; v < buckets; ++v) {
    const char* rec = directory.data() + v * kDirectoryRecordSize;
    const std::uint64_t first = detail::load_u64(rec);
    const std::uint32_t count = detail::load_u32(rec + 8);
    if (count != 0 && first != total) throw CorruptionError(what + ": bucket directory out of order");
    if (count == 0 && first != 0) throw CorruptionError(what + ": empty bucket with nonzero offset");
    total += count;
    offsets[v + 1] = total;
  }
  if (r.remaining() < total * 8) throw CorruptionError(what + ": truncated entries");
  if (r.remaining() > total * 8) throw CorruptionError(what + ": trailing bytes after entries");
  const auto raw = r.bytes(total * 8);
  std::vector<IndexEntry> entries(total);
  for (std::uint64_t i = 0; i < total; ++i)
    entries[i] = {detail::load_u32(raw.data() + 8 * i), detail::load_u32(raw.data() + 8 * i + 4)};
  return InvertedIndex(std::move(mask), bank_name, std::move(offsets), std::move(entries));
}

void check_provenance(const InvertedIndex& index, const Bank& bank) {
  if (!(index.mask() == bank.mask()))
    throw ProvenanceError("index mask " + index.mask().pattern() + " differs from bank mask " + bank.mask().pattern());
  if (index.bank_name() != bank.meta().bank_name)
    throw ProvenanceError("index was built for bank '" + index.bank_name() + "', not '" + bank.meta().bank_name + "'");
}

}  // namespace genoogle
