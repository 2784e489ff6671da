#include "genoogle/engine.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "binary_io.hpp"
#include "genoogle/errors.hpp"
#include "genoogle/executor.hpp"

namespace genoogle {

namespace {

constexpr std::string_view kManifestMagic = "GNFM";

std::string fragment_bank_name(const std::string& bank_name, std::uint32_t fragments, std::uint32_t i) {
  return fragments == 1 ? bank_name : bank_name + "#" + std::to_string(i);
}

void write_manifest(const std::filesystem::path& path, const std::vector<std::vector<std::uint32_t>>& ids,
                    std::uint32_t sequence_count) {
  detail::ByteWriter w;
  w.bytes(kManifestMagic);
  w.u16(kManifestFormatVersion);
  w.u32(static_cast<std::uint32_t>(ids.size()));
  w.u32(sequence_count);
  for (const auto& fragment : ids) {
    w.u32(static_cast<std::uint32_t>(fragment.size()));
    for (auto id : fragment) w.u32(id);
  }
  detail::write_file(path, w.buffer());
}

std::vector<std::vector<std::uint32_t>> read_manifest(const std::filesystem::path& path, std::uint32_t& sequence_count) {
  const std::string data = detail::read_file(path);
  const std::string what = "manifest " + path.string();
  detail::ByteReader r(data, what);
  if (r.remaining() < 4 || r.bytes(4) != kManifestMagic) throw FormatError(what + ": bad magic");
  if (const auto v = r.u16(); v != kManifestFormatVersion)
    throw FormatError(what + ": unsupported format version " + std::to_string(v));
  const std::uint32_t fragments = r.u32();
  sequence_count = r.u32();
  if (fragments == 0) throw CorruptionError(what + ": no fragments");
  std::vector<std::vector<std::uint32_t>> ids(fragments);
  for (auto& fragment : ids) {
    const std::uint32_t count = r.u32();
    if (count > r.remaining() / 4) throw CorruptionError(what + ": truncated");
    fragment.resize(count);
    for (auto& id : fragment) id = r.u32();
  }
  return ids;
}

// Decoded bank sequences shared by the workers of one search.
class SubjectCache {
 public:
  explicit SubjectCache(const Engine& engine) : engine_(engine) {}

  std::shared_ptr<const std::string> get(std::uint32_t seq_id) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(seq_id); it != cache_.end()) return it->second;
    }
    auto bases = std::make_shared<const std::string>(engine_.sequence_bases(seq_id));
    std::lock_guard lock(mutex_);
    return cache_.emplace(seq_id, std::move(bases)).first->second;
  }

 private:
  const Engine& engine_;
  std::mutex mutex_;
  std::unordered_map<std::uint32_t, std::shared_ptr<const std::string>> cache_;
};

}  // namespace

void EngineConfig::validate() const {
  if (bank_fragments < 1 || query_splits < 1 || align_workers < 1)
    throw ConfigError("fragments, query splits and workers must all be at least 1");
}

FragmentLayout fragment_layout(const std::filesystem::path& dir, const std::string& bank_name, std::uint32_t fragments) {
  FragmentLayout layout;
  layout.manifest = dir / (bank_name + ".gnfm");
  for (std::uint32_t i = 0; i < fragments; ++i) {
    layout.banks.push_back(dir / (bank_name + "." + std::to_string(i) + ".gndb"));
    layout.indexes.push_back(dir / (bank_name + "." + std::to_string(i) + ".gnix"));
  }
  return layout;
}

FragmentLayout fragment_bank(std::istream& fasta, std::uint32_t fragments, const SpacedSeedMask& mask,
                             const std::filesystem::path& output_dir, const std::string& bank_name,
                             const IndexBuildOptions& options) {
  if (fragments < 1) throw ConfigError("a bank needs at least one fragment");
  std::vector<BankWriter> writers;
  for (std::uint32_t i = 0; i < fragments; ++i) writers.emplace_back(fragment_bank_name(bank_name, fragments, i), mask);
  std::vector<std::vector<std::uint32_t>> ids(fragments);

  FastaReader reader(fasta);
  std::uint32_t next_global = 0;
  while (auto record = reader.next()) {
    std::uint32_t lightest = 0;
    for (std::uint32_t i = 1; i < fragments; ++i)
      if (writers[i].total_bases() < writers[lightest].total_bases()) lightest = i;
    writers[lightest].add(*record);
    ids[lightest].push_back(next_global++);
  }
  if (next_global == 0) throw IngestError("FASTA source holds no records");

  std::filesystem::create_directories(output_dir);
  const FragmentLayout layout = fragment_layout(output_dir, bank_name, fragments);
  for (std::uint32_t i = 0; i < fragments; ++i) {
    writers[i].write(layout.banks[i]);
    const Bank bank = load_bank(layout.banks[i]);
    save_index(build_index(bank, mask, options), layout.indexes[i]);
  }
  write_manifest(layout.manifest, ids, next_global);
  return layout;
}

FragmentLayout fragment_bank(const std::filesystem::path& fasta_path, std::uint32_t fragments,
                             const SpacedSeedMask& mask, const std::filesystem::path& output_dir,
                             const std::string& bank_name, const IndexBuildOptions& options) {
  std::ifstream in(fasta_path);
  if (!in) throw IoError("cannot open FASTA file " + fasta_path.string());
  return fragment_bank(in, fragments, mask, output_dir, bank_name, options);
}

BankSummary summarize_bank(const std::filesystem::path& dir, const std::string& bank_name) {
  const auto manifest = dir / (bank_name + ".gnfm");
  if (!std::filesystem::exists(manifest))
    throw NotFoundError("bank '" + bank_name + "' is not formatted in " + dir.string());
  BankSummary summary;
  const auto ids = read_manifest(manifest, summary.sequence_count);
  summary.fragments = static_cast<std::uint32_t>(ids.size());
  for (const auto& path : fragment_layout(dir, bank_name, summary.fragments).banks)
    summary.total_bases += load_bank(path).meta().total_bases;
  return summary;
}

Engine Engine::open(const std::filesystem::path& dir, const std::string& bank_name) {
  const auto manifest = dir / (bank_name + ".gnfm");
  if (!std::filesystem::exists(manifest))
    throw NotFoundError("bank '" + bank_name + "' is not formatted in " + dir.string());
  std::uint32_t sequence_count = 0;
  auto ids = read_manifest(manifest, sequence_count);
  const auto layout = fragment_layout(dir, bank_name, static_cast<std::uint32_t>(ids.size()));

  Engine engine;
  engine.bank_name_ = bank_name;
  engine.locations_.assign(sequence_count, {UINT32_MAX, 0});
  for (std::uint32_t i = 0; i < ids.size(); ++i) {
    Fragment fragment{load_bank(layout.banks[i]), load_index(layout.indexes[i]), std::move(ids[i])};
    check_provenance(fragment.index, fragment.bank);
    if (i > 0 && !(fragment.bank.mask() == engine.fragments_.front().bank.mask()))
      throw ProvenanceError("fragments of bank '" + bank_name + "' use different masks");
    if (fragment.global_ids.size() != fragment.bank.sequence_count())
      throw CorruptionError("manifest of bank '" + bank_name + "' disagrees with fragment " + std::to_string(i));
    for (std::uint32_t local = 0; local < fragment.global_ids.size(); ++local) {
      const auto global = fragment.global_ids[local];
      if (global >= sequence_count || engine.locations_[global].fragment != UINT32_MAX)
        throw CorruptionError("manifest of bank '" + bank_name + "' has an invalid sequence id");
      engine.locations_[global] = {i, local};
    }
    engine.total_bases_ += fragment.bank.meta().total_bases;
    engine.fragments_.push_back(std::move(fragment));
  }
  for (const auto& loc : engine.locations_)
    if (loc.fragment == UINT32_MAX) throw CorruptionError("manifest of bank '" + bank_name + "' misses sequences");
  return engine;
}

const SequenceMeta& Engine::sequence_meta(std::uint32_t global_id) const {
  if (global_id >= locations_.size())
    throw NotFoundError("sequence " + std::to_string(global_id) + " not in bank " + bank_name_);
  const auto& loc = locations_[global_id];
  return fragments_[loc.fragment].bank.meta().sequences[loc.local_id];
}

std::string Engine::sequence_bases(std::uint32_t global_id) const {
  if (global_id >= locations_.size())
    throw NotFoundError("sequence " + std::to_string(global_id) + " not in bank " + bank_name_);
  const auto& loc = locations_[global_id];
  return fragments_[loc.fragment].bank.sequence_bases(loc.local_id);
}

std::vector<SubInput> split_query(std::string_view query, std::uint32_t k, unsigned window) {
  if (query.size() < window || k <= 1) return {{0, query}};
  const std::size_t starts = query.size() - window + 1;
  const std::size_t pieces = std::min<std::size_t>(k, starts);
  std::vector<SubInput> out;
  for (std::size_t i = 0; i < pieces; ++i) {
    const std::size_t first = i * starts / pieces;
    const std::size_t last = (i + 1) * starts / pieces;  // exclusive
    out.push_back({static_cast<std::uint32_t>(first), query.substr(first, last - 1 - first + window)});
  }
  return out;
}

SearchResult parallel_search(const Engine& engine, std::string_view query, const std::string& query_id,
                             const SearchParams& params, const EngineConfig& config, ParallelStats* stats) {
  config.validate();
  params.validate(engine.mask());
  const std::string bases = normalize_sequence(query);
  const SpacedSeedMask& mask = engine.mask();
  const unsigned m = mask.window();
  if (bases.size() < m)
    throw QueryTooShortError("query of " + std::to_string(bases.size()) + " bases is shorter than the window length " +
                             std::to_string(m));
  ParallelStats local_stats;

  // Index search: one task per (fragment, sub-input).
  const auto pieces = split_query(bases, config.query_splits, m);
  SharedCollection<std::pair<std::uint32_t, std::vector<Hit>>> shared_hits;
  {
    Executor index_workers(engine.fragment_count() * static_cast<unsigned>(pieces.size()));
    for (std::uint32_t f = 0; f < engine.fragment_count(); ++f) {
      for (const auto& piece : pieces) {
        index_workers.submit([&, f, piece] {
          const Fragment& fragment = engine.fragment(f);
          const auto words = process_query(piece.bases, mask, piece.offset);
          std::vector<std::pair<std::uint32_t, std::vector<Hit>>> found;
          for (auto& group : retrieve_hits(fragment.index, words))
            found.emplace_back(fragment.global_ids[group.seq_id], std::move(group.hits));
          shared_hits.append(std::move(found));
        });
        ++local_stats.index_tasks;
      }
    }
    index_workers.wait();
  }

  // Hits of the same bank sequence found by different tasks are merged before chaining.
  std::map<std::uint32_t, std::vector<Hit>> hits_by_sequence;
  for (auto& [seq_id, hits] : shared_hits.take()) {
    auto& dest = hits_by_sequence[seq_id];
    dest.insert(dest.end(), hits.begin(), hits.end());
  }
  std::vector<Hsp> candidates;
  for (auto& [seq_id, hits] : hits_by_sequence)
    for (const auto& h : pipeline::candidate_hsps(seq_id, std::move(hits), m, params)) candidates.push_back(h);

  std::vector<ResultHsp> results;
  if (!candidates.empty()) {
    Executor workers(config.align_workers);
    SubjectCache subjects(engine);

    SharedCollection<Hsp> extended;
    for (const auto& h : candidates) {
      workers.submit([&, h] { extended.append(extend_hsp(bases, *subjects.get(h.seq_id), h, params)); });
    }
    workers.wait();
    local_stats.extension_items = candidates.size();
    const auto after_extension = workers.counters();

    std::map<std::uint32_t, std::vector<Hsp>> by_sequence;
    for (const auto& h : extended.take()) by_sequence[h.seq_id].push_back(h);
    std::vector<Hsp> merged;
    for (auto& [seq_id, group] : by_sequence)
      for (const auto& h : merge_overlapping(std::move(group))) merged.push_back(h);
    const auto selected = select_top(std::move(merged), params);

    SharedCollection<ResultHsp> aligned;
    for (const auto& h : selected) {
      workers.submit([&, h] {
        ResultHsp r;
        if (pipeline::finish_hsp(bases, *subjects.get(h.seq_id), h, engine.total_bases(), params, r))
          aligned.append(std::move(r));
      });
    }
    workers.wait();
    const auto done = workers.counters();
    local_stats.align_enqueued = done.enqueued - after_extension.enqueued;
    local_stats.align_dequeued = done.dequeued - after_extension.dequeued;
    local_stats.align_executed = done.executed - after_extension.executed;
    results = aligned.take();
  }

  if (stats) *stats = local_stats;
  return pipeline::assemble(engine, query_id, static_cast<std::uint32_t>(bases.size()), params, std::move(results));
}

}  // namespace genoogle
