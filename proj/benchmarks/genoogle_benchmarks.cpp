#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "genoogle/alignment.hpp"
#include "genoogle/engine.hpp"

namespace {

using namespace genoogle;

const SpacedSeedMask kMask = parse_mask("111010010100110111");

std::string random_bases(std::mt19937_64& rng, std::size_t n) {
  std::string s(n, 'A');
  for (auto& c : s) c = "ACGT"[rng() & 3u];
  return s;
}

std::string mutate(std::mt19937_64& rng, std::string s, double rate) {
  std::bernoulli_distribution flip(rate);
  for (auto& c : s)
    if (flip(rng)) c = c == 'A' ? 'C' : 'A';
  return s;
}

// A 4 Mbase bank formatted once per process.
struct SharedBank {
  std::filesystem::path dir;
  std::vector<std::string> sequences;
  std::unique_ptr<Engine> engine;

  SharedBank() {
    std::mt19937_64 rng(1);
    dir = std::filesystem::temp_directory_path() / ("genoogle-bench-" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(dir / "bank.fasta");
      for (int i = 0; i < 400; ++i) {
        sequences.push_back(random_bases(rng, 10'000));
        out << ">s" << i << "\n" << sequences.back() << "\n";
      }
    }
    fragment_bank(dir / "bank.fasta", 2, kMask, dir, "bench");
    engine = std::make_unique<Engine>(Engine::open(dir, "bench"));
  }
  ~SharedBank() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }

  std::string query(std::size_t length, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::string q;
    while (q.size() < length) {
      const auto& src = sequences[rng() % sequences.size()];
      q += mutate(rng, src.substr(rng() % 8000, 1000), 0.03);
    }
    q.resize(length);
    return q;
  }
};

const SharedBank& shared_bank() {
  static const SharedBank bank;
  return bank;
}

void BM_ApplyMask(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto text = random_bases(rng, 1 << 16);
  std::size_t pos = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_mask(std::string_view(text).substr(pos, 18), kMask));
    pos = (pos + 1) & ((1 << 16) - 32);
  }
}
BENCHMARK(BM_ApplyMask);

void BM_ProcessQuery(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto query = random_bases(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(process_query(query, kMask));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProcessQuery)->Arg(1000)->Arg(50'000);

void BM_IndexLookup(benchmark::State& state) {
  const auto& bank = shared_bank();
  const auto words = process_query(bank.query(10'000, 4), kMask);
  const auto& index = bank.engine->fragment(0).index;
  for (auto _ : state) {
    std::size_t total = 0;
    for (const auto& w : words) total += index.lookup(w.word).size();
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_IndexLookup);

void BM_BandedSmithWaterman(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto a = random_bases(rng, static_cast<std::size_t>(state.range(0)));
  const auto b = mutate(rng, a, 0.05);
  SearchParams p;
  for (auto _ : state) benchmark::DoNotOptimize(banded_smith_waterman(a, b, p));
}
BENCHMARK(BM_BandedSmithWaterman)->Arg(200)->Arg(2000);

void BM_SegmentedAlign(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const auto a = random_bases(rng, 20'000);
  const auto b = mutate(rng, a, 0.05);
  SearchParams p;
  for (auto _ : state) benchmark::DoNotOptimize(segmented_align(a, b, p));
}
BENCHMARK(BM_SegmentedAlign);

void BM_Search(benchmark::State& state) {
  const auto& bank = shared_bank();
  const auto query = bank.query(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(search(*bank.engine, query, "bench", SearchParams{}));
}
BENCHMARK(BM_Search)->Arg(200)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_ParallelSearch(benchmark::State& state) {
  const auto& bank = shared_bank();
  const auto query = bank.query(20'000, 8);
  const auto workers = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel_search(*bank.engine, query, "bench", SearchParams{}, {2, workers, workers}));
}
BENCHMARK(BM_ParallelSearch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
