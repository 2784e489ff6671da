#include "genoogle/databank.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <utility>

#include "binary_io.hpp"
#include "genoogle/errors.hpp"

namespace genoogle {

namespace {

constexpr std::string_view kBankMagic = "GNDB";
constexpr std::size_t kTableRecordSize = 4 + 4 + 4 + 8 + 8 + 8;

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::size_t payload_size(std::uint32_t length) {
  const std::size_t words = (std::size_t{length} + 15) / 16;
  return 4 + 1 + 4 * words + (std::size_t{length} + 7) / 8;
}

// Packs normalized bases into the payload layout described in the header.
std::string encode_payload(std::string_view bases) {
  detail::ByteWriter w;
  const auto length = bases.size();
  const auto words = (length + 15) / 16;
  w.u32(static_cast<std::uint32_t>(words));
  w.u8(static_cast<std::uint8_t>(length == 0 ? 0 : (length - 1) % 16 + 1));
  std::string bitmap((length + 7) / 8, '\0');
  for (std::size_t wi = 0; wi < words; ++wi) {
    std::uint32_t value = 0;
    const std::size_t end = std::min(length, (wi + 1) * 16);
    for (std::size_t i = wi * 16; i < end; ++i) {
      std::uint8_t code = base_code_or_invalid(bases[i]);
      if (code == 0xFF) {
        bitmap[i / 8] = static_cast<char>(static_cast<unsigned char>(bitmap[i / 8]) | (1u << (i % 8)));
        code = 0;
      }
      value = (value << 2) | code;
    }
    w.u32(value);
  }
  w.bytes(bitmap);
  return std::move(w.buffer());
}

std::string decode_payload(std::string_view payload, std::uint32_t length, const std::string& what) {
  detail::ByteReader r(payload, what);
  const std::uint32_t words = r.u32();
  const std::uint8_t trailing = r.u8();
  const std::uint32_t expected_words = (length + 15) / 16;
  const std::uint8_t expected_trailing = length == 0 ? 0 : static_cast<std::uint8_t>((length - 1) % 16 + 1);
  if (words != expected_words || trailing != expected_trailing)
    throw CorruptionError(what + ": payload size does not match sequence length");
  std::string out(length, 'A');
  for (std::uint32_t wi = 0; wi < words; ++wi) {
    std::uint32_t value = r.u32();
    const std::size_t count = wi + 1 == words ? trailing : 16;
    for (std::size_t k = count; k-- > 0;) {
      out[std::size_t{wi} * 16 + k] = decode_base(value & 3u);
      value >>= 2;
    }
  }
  const auto bitmap = r.bytes((std::size_t{length} + 7) / 8);
  for (std::size_t i = 0; i < length; ++i)
    if (static_cast<unsigned char>(bitmap[i / 8]) & (1u << (i % 8))) out[i] = kAmbiguousBase;
  return out;
}

}  // namespace

std::optional<FastaRecord> FastaReader::next() {
  std::string line;
  if (!have_header_) {
    while (std::getline(in_, line)) {
      ++line_no_;
      strip_cr(line);
      if (line.empty()) continue;
      if (line.front() != '>')
        throw IngestError("FASTA line " + std::to_string(line_no_) +
                          ": sequence data before any '>' header");
      pending_header_ = line.substr(1);
      have_header_ = true;
      break;
    }
    if (!have_header_) return std::nullopt;
  }

  FastaRecord record;
  const auto split = pending_header_.find_first_of(" \t");
  record.name = pending_header_.substr(0, split);
  if (split != std::string::npos) {
    const auto desc = pending_header_.find_first_not_of(" \t", split);
    if (desc != std::string::npos) record.description = pending_header_.substr(desc);
  }
  have_header_ = false;

  while (std::getline(in_, line)) {
    ++line_no_;
    strip_cr(line);
    if (!line.empty() && line.front() == '>') {
      pending_header_ = line.substr(1);
      have_header_ = true;
      break;
    }
    for (char c : line)
      if (c != ' ' && c != '\t') record.sequence.push_back(c);
  }
  return record;
}

std::vector<FastaRecord> read_fasta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open FASTA file " + path.string());
  FastaReader reader(in);
  std::vector<FastaRecord> out;
  while (auto record = reader.next()) out.push_back(std::move(*record));
  return out;
}

BankWriter::BankWriter(std::string bank_name, SpacedSeedMask mask, Limits limits)
    : bank_name_(std::move(bank_name)), mask_(std::move(mask)), limits_(limits) {}

std::uint32_t BankWriter::add(const FastaRecord& record) {
  const std::string label = "record '" + record.name + "'";
  if (record.sequence.empty()) throw IngestError(label + " has no sequence data");
  if (entries_.size() + 1 > limits_.max_sequences)
    throw CapacityError("bank exceeds " + std::to_string(limits_.max_sequences) + " sequences at " + label);
  if (record.sequence.size() >= limits_.max_length)
    throw CapacityError(label + " is longer than the 32-bit position limit");

  std::string bases;
  try {
    bases = normalize_sequence(record.sequence);
  } catch (const InvalidSymbolError& e) {
    throw IngestError(label + ": " + e.what());
  }
  const auto id = static_cast<std::uint32_t>(entries_.size());
  total_bases_ += bases.size();
  entries_.push_back({record.name, record.description, static_cast<std::uint32_t>(bases.size()),
                      encode_payload(bases)});
  return id;
}

BankMeta BankWriter::write(const std::filesystem::path& path) const {
  BankMeta meta;
  meta.bank_name = bank_name_;
  meta.total_bases = total_bases_;
  meta.sequence_count = sequence_count();
  meta.mask_pattern = mask_.pattern();

  detail::ByteWriter w;
  w.bytes(kBankMagic);
  w.u16(kBankFormatVersion);
  w.short_string(mask_.pattern());
  w.u32(meta.sequence_count);
  w.u64(meta.total_bases);

  // String heap: bank name first, then name/description of each sequence.
  std::string heap = bank_name_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> string_offsets;
  for (const auto& e : entries_) {
    const std::uint64_t name_off = heap.size();
    heap += e.name;
    const std::uint64_t desc_off = heap.size();
    heap += e.description;
    string_offsets.emplace_back(name_off, desc_off);
  }

  const std::uint64_t table_start = w.size();
  const std::uint64_t heap_start = table_start + kTableRecordSize * entries_.size();
  std::uint64_t payload_offset = heap_start + 8 + 4 + heap.size();

  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    w.u32(e.length);
    w.u32(static_cast<std::uint32_t>(e.name.size()));
    w.u32(static_cast<std::uint32_t>(e.description.size()));
    w.u64(string_offsets[i].first);
    w.u64(string_offsets[i].second);
    w.u64(payload_offset);
    meta.sequences.push_back({static_cast<std::uint32_t>(i), e.name, e.description, e.length, payload_offset});
    payload_offset += e.payload.size();
  }
  w.u64(heap.size());
  w.u32(static_cast<std::uint32_t>(bank_name_.size()));
  w.bytes(heap);
  for (const auto& e : entries_) w.bytes(e.payload);

  detail::write_file(path, w.buffer());
  return meta;
}

BankMeta format_bank(std::istream& fasta, const std::string& bank_name, const SpacedSeedMask& mask,
                     const std::filesystem::path& output_path) {
  FastaReader reader(fasta);
  BankWriter writer(bank_name, mask);
  while (auto record = reader.next()) writer.add(*record);
  if (writer.sequence_count() == 0) throw IngestError("FASTA source holds no records");
  return writer.write(output_path);
}

BankMeta format_bank(const std::filesystem::path& fasta_path, const std::string& bank_name,
                     const SpacedSeedMask& mask, const std::filesystem::path& output_path) {
  std::ifstream in(fasta_path);
  if (!in) throw IoError("cannot open FASTA file " + fasta_path.string());
  return format_bank(in, bank_name, mask, output_path);
}

Bank::Bank(Bank&& other) noexcept
    : path_(std::move(other.path_)),
      fd_(std::exchange(other.fd_, -1)),
      file_size_(other.file_size_),
      meta_(std::move(other.meta_)),
      mask_(std::move(other.mask_)) {}

Bank& Bank::operator=(Bank&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    file_size_ = other.file_size_;
    meta_ = std::move(other.meta_);
    mask_ = std::move(other.mask_);
  }
  return *this;
}

Bank::~Bank() {
  if (fd_ >= 0) ::close(fd_);
}

Bank load_bank(const std::filesystem::path& path) {
  Bank bank;
  bank.path_ = path;
  bank.fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (bank.fd_ < 0) throw IoError("cannot open bank " + path.string() + ": " + std::strerror(errno));
  struct stat st {};
  if (::fstat(bank.fd_, &st) != 0) throw IoError("cannot stat bank " + path.string());
  bank.file_size_ = static_cast<std::uint64_t>(st.st_size);

  // Header, table and heap all precede the payloads; read them in one go.
  std::ifstream in(path, std::ios::binary);
  std::string prefix;
  {
    std::string head(4 + 2 + 2 + 0xFFFF + 4 + 8, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    prefix = std::move(head);
  }
  const std::string what = "bank " + path.string();
  detail::ByteReader header(prefix, what);
  if (header.remaining() < 4 || header.bytes(4) != kBankMagic) throw FormatError(what + ": bad magic");
  const auto version = header.u16();
  if (version != kBankFormatVersion)
    throw FormatError(what + ": unsupported format version " + std::to_string(version));
  bank.meta_.mask_pattern = header.short_string();
  bank.meta_.sequence_count = header.u32();
  bank.meta_.total_bases = header.u64();
  try {
    bank.mask_ = parse_mask(bank.meta_.mask_pattern);
  } catch (const MaskFormatError& e) {
    throw CorruptionError(what + ": " + e.what());
  }

  const std::uint64_t table_start = header.position();
  const std::uint64_t table_bytes = kTableRecordSize * std::uint64_t{bank.meta_.sequence_count};
  if (table_start + table_bytes + 12 > bank.file_size_) throw CorruptionError(what + ": truncated metadata table");

  std::string table(table_bytes + 12, '\0');
  in.clear();
  in.seekg(static_cast<std::streamoff>(table_start));
  in.read(table.data(), static_cast<std::streamsize>(table.size()));
  if (static_cast<std::size_t>(in.gcount()) != table.size()) throw CorruptionError(what + ": truncated metadata table");
  detail::ByteReader tr(table, what);

  struct Raw {
    std::uint32_t length, name_len, desc_len;
    std::uint64_t name_off, desc_off, payload_off;
  };
  std::vector<Raw> raws(bank.meta_.sequence_count);
  for (auto& raw : raws) {
    raw.length = tr.u32();
    raw.name_len = tr.u32();
    raw.desc_len = tr.u32();
    raw.name_off = tr.u64();
    raw.desc_off = tr.u64();
    raw.payload_off = tr.u64();
  }
  const std::uint64_t heap_size = tr.u64();
  const std::uint32_t bank_name_len = tr.u32();
  const std::uint64_t heap_start = table_start + table.size();
  if (heap_start + heap_size > bank.file_size_ || bank_name_len > heap_size)
    throw CorruptionError(what + ": truncated string heap");
  std::string heap(heap_size, '\0');
  in.read(heap.data(), static_cast<std::streamsize>(heap_size));
  if (static_cast<std::uint64_t>(in.gcount()) != heap_size) throw CorruptionError(what + ": truncated string heap");
  bank.meta_.bank_name = heap.substr(0, bank_name_len);

  std::uint64_t total = 0;
  bank.meta_.sequences.reserve(raws.size());
  for (std::uint32_t i = 0; i < raws.size(); ++i) {
    const Raw& raw = raws[i];
    if (raw.name_off + raw.name_len > heap_size || raw.desc_off + raw.desc_len > heap_size)
      throw CorruptionError(what + ": string heap reference out of range");
    if (raw.payload_off + payload_size(raw.length) > bank.file_size_)
      throw CorruptionError(what + ": truncated payload of sequence " + std::to_string(i));
    bank.meta_.sequences.push_back(
        {i, heap.substr(raw.name_off, raw.name_len), heap.substr(raw.desc_off, raw.desc_len), raw.length, raw.payload_off});
    total += raw.length;
  }
  if (total != bank.meta_.total_bases) throw CorruptionError(what + ": total_bases does not match sequence lengths");
  return bank;
}

SequenceRecord Bank::get_sequence(std::uint32_t seq_id) const {
  if (seq_id >= meta_.sequence_count)
    throw NotFoundError("sequence " + std::to_string(seq_id) + " not in bank " + meta_.bank_name + " (" +
                        std::to_string(meta_.sequence_count) + " sequences)");
  const SequenceMeta& sm = meta_.sequences[seq_id];
  std::string payload(payload_size(sm.length), '\0');
  std::size_t done = 0;
  while (done < payload.size()) {
    const auto n = ::pread(fd_, payload.data() + done, payload.size() - done,
                           static_cast<off_t>(sm.payload_offset + done));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw CorruptionError("bank " + path_.string() + ": short read on sequence " + std::to_string(seq_id));
    done += static_cast<std::size_t>(n);
  }
  return {sm, decode_payload(payload, sm.length, "bank " + path_.string())};
}

std::string Bank::sequence_bases(std::uint32_t seq_id) const { return get_sequence(seq_id).bases; }

std::vector<BankWindow> bank_windows(const Bank& bank, std::uint32_t seq_id) {
  const std::string bases = bank.sequence_bases(seq_id);
  const unsigned m = bank.mask().window();
  std::vector<BankWindow> out;
  for (std::size_t pos = 0; pos + m <= bases.size(); pos += m) {
    BankWindow w{static_cast<std::uint32_t>(pos), bases.substr(pos, m), true};
    w.indexable = w.bases.find(kAmbiguousBase) == std::string::npos;
    out.push_back(std::move(w));
  }
  return out;
}

IndexMemoryEstimate estimate_index_memory(std::uint64_t total_bases, unsigned window, unsigned weight) {
  if (weight < 1 || weight > kMaxWordLength)
    throw DomainError("sub-sequence weight " + std::to_string(weight) + " outside [1,16]");
  if (window < weight) throw DomainError("window length must be at least the weight");
  IndexMemoryEstimate e;
  e.subsequences = total_bases / window;
  e.bytes = e.subsequences * 8 + (std::uint64_t{1} << (2 * weight)) * 16;
  return e;
}

}  // namespace genoogle
