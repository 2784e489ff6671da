#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "genoogle/engine.hpp"
#include "genoogle/errors.hpp"
#include "test_support.hpp"

namespace genoogle {
namespace {

using testing::TempDir;

const SpacedSeedMask kMask = parse_mask("111010010100110111");

TEST(EngineConfig, Validation) {
  EXPECT_NO_THROW(EngineConfig{}.validate());
  EXPECT_THROW((EngineConfig{0, 1, 1}.validate()), ConfigError);
  EXPECT_THROW((EngineConfig{1, 0, 1}.validate()), ConfigError);
  EXPECT_THROW((EngineConfig{1, 1, 0}.validate()), ConfigError);
}

TEST(FragmentBank, SingleFragmentMatchesPlainFormat) {
  TempDir dir;
  std::mt19937_64 rng(1);
  const auto records = testing::random_records(rng, 20, 50, 500);
  testing::write_fasta(dir / "in.fasta", records);
  const auto layout = fragment_bank(dir / "in.fasta", 1, kMask, dir / "frag", "demo");
  ASSERT_EQ(layout.banks.size(), 1u);
  EXPECT_EQ(layout.banks[0], dir / "frag" / "demo.0.gndb");
  EXPECT_EQ(layout.indexes[0], dir / "frag" / "demo.0.gnix");
  format_bank(dir / "in.fasta", "demo", kMask, dir / "plain.gndb");
  const Bank plain = load_bank(dir / "plain.gndb");
  const Bank frag = load_bank(layout.banks[0]);
  EXPECT_EQ(frag.meta().sequences, plain.meta().sequences);
  EXPECT_EQ(frag.meta().bank_name, "demo");
  EXPECT_EQ(load_index(layout.indexes[0]), build_index(plain, kMask));
}

TEST(FragmentBank, EqualSequencesSplitEvenly) {
  TempDir dir;
  std::istringstream in(">a\n" + std::string(100, 'A') + "\n>b\n" + std::string(100, 'C') + "\n>c\n" +
                        std::string(100, 'G') + "\n>d\n" + std::string(100, 'T') + "\n");
  fragment_bank(in, 2, kMask, dir.path(), "even");
  const Engine engine = Engine::open(dir.path(), "even");
  ASSERT_EQ(engine.fragment_count(), 2u);
  EXPECT_EQ(engine.fragment(0).global_ids, (std::vector<std::uint32_t>{0, 2}));
  EXPECT_EQ(engine.fragment(1).global_ids, (std::vector<std::uint32_t>{1, 3}));
  EXPECT_EQ(engine.fragment(0).bank.meta().bank_name, "even#0");
  EXPECT_EQ(engine.sequence_meta(2).name, "c");
  EXPECT_EQ(engine.sequence_bases(3), std::string(100, 'T'));
  EXPECT_THROW(engine.sequence_meta(4), NotFoundError);
}

TEST(FragmentBank, BaseTotalsStayBalanced) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 15; ++trial) {
    TempDir dir;
    const auto records = testing::random_records(rng, 5 + rng() % 40, 20, 2000);
    const std::uint32_t f = 1 + rng() % 5;
    const Engine engine = testing::make_engine(dir.path(), records, parse_mask("11011"), f);
    std::uint64_t largest = 0;
    for (const auto& r : records) largest = std::max<std::uint64_t>(largest, r.sequence.size());
    std::uint64_t lo = UINT64_MAX, hi = 0, total = 0;
    std::set<std::uint32_t> ids;
    for (std::uint32_t i = 0; i < engine.fragment_count(); ++i) {
      const auto bases = engine.fragment(i).bank.meta().total_bases;
      lo = std::min(lo, bases);
      hi = std::max(hi, bases);
      total += bases;
      ids.insert(engine.fragment(i).global_ids.begin(), engine.fragment(i).global_ids.end());
    }
    EXPECT_LE(hi - lo, largest);
    EXPECT_EQ(total, engine.total_bases());
    EXPECT_EQ(ids.size(), records.size());
    for (std::uint32_t g = 0; g < records.size(); ++g) {
      EXPECT_EQ(engine.sequence_meta(g).name, records[g].name);
      EXPECT_EQ(engine.sequence_bases(g), records[g].sequence);
    }
    const auto summary = summarize_bank(dir.path(), "bank");
    EXPECT_EQ(summary.fragments, f);
    EXPECT_EQ(summary.sequence_count, records.size());
    EXPECT_EQ(summary.total_bases, total);
  }
}

TEST(Engine, OpenChecksFilesAndProvenance) {
  TempDir dir;
  std::mt19937_64 rng(3);
  const auto records = testing::random_records(rng, 6, 100, 200);
  EXPECT_THROW(Engine::open(dir.path(), "bank"), NotFoundError);
  EXPECT_THROW(summarize_bank(dir.path(), "bank"), NotFoundError);
  testing::make_engine(dir.path(), records, kMask, 2, "bank");
  testing::make_engine(dir.path(), records, kMask, 2, "other");
  std::filesystem::copy_file(dir / "other.1.gnix", dir / "bank.1.gnix", std::filesystem::copy_options::overwrite_existing);
  EXPECT_THROW(Engine::open(dir.path(), "bank"), ProvenanceError);
}

TEST(SplitQuery, Examples) {
  const std::string q(100, 'A');
  const auto one = split_query(q, 1, 18);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].offset, 0u);
  EXPECT_EQ(one[0].bases.size(), 100u);
  const auto two = split_query(q, 2, 18);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].offset, 0u);
  EXPECT_EQ(two[0].bases.size(), 58u);
  EXPECT_EQ(two[1].offset, 41u);
  EXPECT_EQ(two[1].bases.size(), 59u);
  EXPECT_EQ(split_query(std::string(19, 'A'), 4, 18).size(), 2u);
  EXPECT_EQ(split_query(std::string(18, 'A'), 4, 18).size(), 1u);
}

TEST(SplitQuery, WindowsArePartitioned) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const unsigned m = 1 + rng() % 20;
    const std::string q(m + rng() % 300, 'A');
    const std::uint32_t k = 1 + rng() % 9;
    const auto pieces = split_query(q, k, m);
    EXPECT_LE(pieces.size(), k);
    std::vector<int> seen(q.size() - m + 1, 0);
    std::uint32_t expected_offset = 0;
    for (const auto& p : pieces) {
      ASSERT_GE(p.bases.size(), m);
      EXPECT_EQ(p.offset, expected_offset);
      EXPECT_EQ(p.bases.data(), q.data() + p.offset);
      for (std::size_t s = 0; s + m <= p.bases.size(); ++s) ++seen[p.offset + s];
      expected_offset = p.offset + static_cast<std::uint32_t>(p.bases.size() - m + 1);
    }
    for (int c : seen) EXPECT_EQ(c, 1);
  }
}

class ParallelFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    std::mt19937_64 rng(42);
    records_ = testing::random_records(rng, 30, 200, 2500);
    for (std::uint32_t f : {1u, 3u})
      testing::make_engine(dir_->path(), records_, kMask, f, "f" + std::to_string(f));
  }
  static void TearDownTestSuite() { delete dir_; }

  static TempDir* dir_;
  static std::vector<FastaRecord> records_;
};

TempDir* ParallelFixture::dir_ = nullptr;
std::vector<FastaRecord> ParallelFixture::records_;

TEST_F(ParallelFixture, MatchesSequentialSearch) {
  const Engine single = Engine::open(dir_->path(), "f1");
  const Engine triple = Engine::open(dir_->path(), "f3");
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    std::string query;
    for (int part = 0; part < 3; ++part) {
      const auto& src = records_[rng() % records_.size()].sequence;
      const std::size_t len = 60 + rng() % 140;
      const std::size_t at = rng() % (src.size() - len);
      query += testing::mutate(rng, src.substr(at, len), 0.03);
    }
    SearchParams p;
    p.max_results = 1 + rng() % 8;
    const auto expected = search(single, query, "q", p);
    for (const Engine* engine : {&single, &triple}) {
      for (std::uint32_t k : {1u, 2u, 5u}) {
        for (std::uint32_t w : {1u, 3u}) {
          ParallelStats stats;
          auto got = parallel_search(*engine, query, "q", p, {engine->fragment_count(), k, w}, &stats);
          got.bank_name = expected.bank_name;
          EXPECT_EQ(got, expected) << "trial " << trial << " k=" << k << " w=" << w;
          EXPECT_EQ(stats.index_tasks, engine->fragment_count() * split_query(query, k, 18).size());
          EXPECT_EQ(stats.align_enqueued, stats.align_dequeued);
          EXPECT_EQ(stats.align_enqueued, stats.align_executed);
          EXPECT_LE(stats.align_enqueued, p.max_results);
          EXPECT_GE(stats.align_enqueued, got.hsps.size());
        }
      }
    }
  }
}

TEST_F(ParallelFixture, NoCandidatesMeansNoWork) {
  const Engine engine = Engine::open(dir_->path(), "f3");
  ParallelStats stats;
  const auto result = parallel_search(engine, std::string(40, 'N'), "empty", SearchParams{}, {3, 2, 4}, &stats);
  EXPECT_TRUE(result.hsps.empty());
  EXPECT_EQ(result.query_length, 40u);
  EXPECT_EQ(stats.extension_items, 0u);
  EXPECT_EQ(stats.align_enqueued, 0u);
  EXPECT_EQ(stats.index_tasks, 6u);
}

TEST_F(ParallelFixture, RepeatedRunsAreStable) {
  const Engine engine = Engine::open(dir_->path(), "f3");
  const std::string query = records_[5].sequence.substr(0, 180) + records_[9].sequence.substr(50, 150);
  const auto first = parallel_search(engine, query, "q", SearchParams{}, {3, 4, 4});
  for (int i = 0; i < 30; ++i) EXPECT_EQ(parallel_search(engine, query, "q", SearchParams{}, {3, 4, 4}), first);
  EXPECT_THROW(parallel_search(engine, "ACGT", "q", SearchParams{}, {3, 1, 1}), QueryTooShortError);
  EXPECT_THROW(parallel_search(engine, query, "q", SearchParams{}, {3, 1, 0}), ConfigError);
}

}  // namespace
}  // namespace genoogle
