#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "genoogle/engine.hpp"
#include "genoogle/errors.hpp"
#include "genoogle/search.hpp"
#include "test_support.hpp"

namespace genoogle {
namespace {

using testing::TempDir;

const SpacedSeedMask kMask = parse_mask("111010010100110111");

TEST(ProcessQuery, OneWordPerWindowStart) {
  const std::string q = "ACGTACGTACGTACGTACGTAC";
  const auto words = process_query(q, kMask);
  ASSERT_EQ(words.size(), q.size() - 17);
  for (std::uint32_t i = 0; i < words.size(); ++i) {
    EXPECT_EQ(words[i].query_pos, i);
    EXPECT_EQ(words[i].word, apply_mask(q.substr(i, 18), kMask));
  }
  EXPECT_EQ(words[0].word, (EncodedWord{406641, 11}));
}

TEST(ProcessQuery, OffsetAndAmbiguity) {
  const std::string q = std::string(20, 'A') + "N" + std::string(20, 'C');
  const auto words = process_query(q, kMask, 100);
  std::vector<std::uint32_t> starts;
  for (const auto& w : words) starts.push_back(w.query_pos);
  EXPECT_EQ(starts, (std::vector<std::uint32_t>{100, 101, 102, 121, 122, 123}));
  EXPECT_THROW(process_query(std::string(17, 'A'), kMask), QueryTooShortError);
}

TEST(ChainHits, JoinsCloseHitsAndSplitsFarOnes) {
  SearchParams p;
  const std::vector<Hit> hits{{0, 0}, {18, 18}, {36, 36}, {10, 200}, {12, 218}};
  const auto areas = chain_hits(hits, 18, p);
  ASSERT_EQ(areas.size(), 2u);
  EXPECT_EQ(areas[0], (Area{0, 54, 0, 54}));
  EXPECT_EQ(areas[1], (Area{10, 30, 200, 236}));
}

TEST(ChainHits, DiagonalDriftBoundsTheChain) {
  SearchParams p;
  p.max_entry_distance = 30;
  const std::vector<Hit> hits{{100, 0}, {90, 18}, {80, 36}};
  const auto areas = chain_hits(hits, 18, p);
  ASSERT_EQ(areas.size(), 2u);
  EXPECT_EQ(areas[0], (Area{90, 118, 0, 36}));
  EXPECT_EQ(areas[1], (Area{80, 98, 36, 54}));
  EXPECT_TRUE(chain_hits({}, 18, p).empty());
}

TEST(FilterHsps, DropsShortAreas) {
  SearchParams p;
  p.min_hsp_length = 30;
  const std::vector<Area> areas{{0, 18, 0, 18}, {0, 40, 0, 36}, {5, 35, 100, 140}};
  const auto hsps = filter_hsps(7, areas, p);
  ASSERT_EQ(hsps.size(), 2u);
  EXPECT_EQ(hsps[0], (Hsp{7, 0, 40, 0, 36}));
  EXPECT_EQ(hsps[1], (Hsp{7, 5, 35, 100, 140}));
}

TEST(ExtendHsp, WalksIdenticalFlanksAndStopsAtDropoff) {
  SearchParams p;
  std::mt19937_64 rng(1);
  const auto core = testing::random_bases(rng, 40);
  const std::string bank = "GGGG" + core + "TTTT";
  EXPECT_EQ(extend_hsp(core, bank, {0, 10, 20, 14, 24}, p), (Hsp{0, 0, 40, 4, 44}));

  p.extension_dropoff = 10;
  const std::string query = std::string(10, 'A') + "CCCCC" + std::string(20, 'G');
  const std::string subject = std::string(10, 'A') + "TTTTT" + std::string(20, 'G');
  EXPECT_EQ(extend_hsp(query, subject, {0, 15, 35, 15, 35}, p), (Hsp{0, 15, 35, 15, 35}));
  p.extension_dropoff = 20;
  EXPECT_EQ(extend_hsp(query, subject, {0, 15, 35, 15, 35}, p), (Hsp{0, 15, 35, 15, 35}));
  p.extension_dropoff = 15;
  const std::string wider = std::string(16, 'A') + "CCCCC" + std::string(20, 'G');
  const std::string wider_bank = std::string(16, 'A') + "TTTTT" + std::string(20, 'G');
  EXPECT_EQ(extend_hsp(wider, wider_bank, {0, 21, 41, 21, 41}, p), (Hsp{0, 0, 41, 0, 41}));
}

TEST(ExtendHsp, NeverShrinksAndStaysInBounds) {
  SearchParams p;
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto q = testing::random_bases(rng, 20 + rng() % 200);
    const auto b = testing::mutate(rng, q, 0.1);
    const std::uint32_t len = 1 + rng() % 19;
    const std::uint32_t qs = rng() % (q.size() - len);
    const Hsp in{0, qs, qs + len, qs, qs + len};
    const Hsp out = extend_hsp(q, b, in, p);
    EXPECT_LE(out.query_start, in.query_start);
    EXPECT_GE(out.query_end, in.query_end);
    EXPECT_LE(out.query_end, q.size());
    EXPECT_EQ(out.query_end - out.query_start, out.bank_end - out.bank_start);
    EXPECT_GE(out.length(), in.length());
  }
}

TEST(MergeOverlapping, ReachesAFixpoint) {
  const std::vector<Hsp> in{{0, 0, 10, 0, 10}, {0, 20, 30, 20, 30}, {0, 5, 25, 5, 25}, {0, 50, 60, 0, 10}};
  const auto out = merge_overlapping(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], (Hsp{0, 0, 30, 0, 30}));
  EXPECT_EQ(out[1], (Hsp{0, 50, 60, 0, 10}));
}

TEST(MergeOverlapping, NeverLosesCoverageAndLeavesNoOverlap) {
  std::mt19937_64 rng(23);
  auto covered = [](const std::vector<Hsp>& hsps) {
    std::set<std::uint32_t> q;
    for (const auto& h : hsps)
      for (auto i = h.query_start; i < h.query_end; ++i) q.insert(i);
    return q;
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Hsp> in;
    for (int i = 0, n = 1 + rng() % 12; i < n; ++i) {
      const std::uint32_t qs = rng() % 200, bs = rng() % 200;
      in.push_back({3, qs, qs + 1 + static_cast<std::uint32_t>(rng() % 40), bs, bs + 1 + static_cast<std::uint32_t>(rng() % 40)});
    }
    const auto out = merge_overlapping(in);
    const auto before = covered(in), after = covered(out);
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        EXPECT_FALSE(out[i].query_start < out[j].query_end && out[j].query_start < out[i].query_end &&
                     out[i].bank_start < out[j].bank_end && out[j].bank_start < out[i].bank_end);
  }
}

TEST(SelectTop, SortsByLengthThenPosition) {
  SearchParams p;
  p.max_results = 3;
  const std::vector<Hsp> in{{1, 0, 20, 0, 20}, {0, 0, 30, 50, 80}, {0, 0, 20, 5, 25}, {0, 0, 20, 0, 20}, {2, 0, 99, 0, 10}};
  const auto out = select_top(in, p);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], (Hsp{0, 0, 30, 50, 80}));
  EXPECT_EQ(out[1], (Hsp{0, 0, 20, 0, 20}));
  EXPECT_EQ(out[2], (Hsp{0, 0, 20, 5, 25}));
  p.max_results = 0;
  EXPECT_EQ(select_top(in, p).size(), in.size());
}

TEST(SelectTop, OutputIsPrefixOfFullOrder) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Hsp> in;
    for (int i = 0, n = rng() % 30; i < n; ++i) {
      const std::uint32_t qs = rng() % 50, bs = rng() % 50;
      in.push_back({static_cast<std::uint32_t>(rng() % 3), qs, qs + static_cast<std::uint32_t>(rng() % 10), bs,
                    bs + static_cast<std::uint32_t>(rng() % 10)});
    }
    SearchParams all;
    all.max_results = 0;
    SearchParams some;
    some.max_results = 1 + rng() % 10;
    const auto full = select_top(in, all);
    const auto top = select_top(in, some);
    ASSERT_EQ(top.size(), std::min<std::size_t>(in.size(), some.max_results));
    EXPECT_TRUE(std::equal(top.begin(), top.end(), full.begin()));
  }
}

TEST(ScoreHsp, KnownValuesAndIdentity) {
  SearchParams p;
  p.evalue_lambda = 0.5;
  p.evalue_k = 0.1;
  const auto s = score_hsp(20, 100, 1000, p);
  EXPECT_DOUBLE_EQ(s.e_value, 0.45399929762484853);
  EXPECT_DOUBLE_EQ(s.bit_score, (10 - std::log(0.1)) / std::log(2.0));
  const auto zero = score_hsp(0, 100, 1000, p);
  EXPECT_DOUBLE_EQ(zero.e_value, 0.1 * 100 * 1000);
  EXPECT_DOUBLE_EQ(zero.bit_score, -std::log(0.1) / std::log(2.0));
  p.evalue_k = 0;
  EXPECT_THROW(score_hsp(1, 1, 1, p), ConfigError);
}

TEST(ScoreHsp, Monotone) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(0.01, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    SearchParams p;
    p.evalue_lambda = pos(rng);
    p.evalue_k = pos(rng);
    const double s = rng() % 100;
    const auto a = score_hsp(s, 500, 100000, p), b = score_hsp(s + 1, 500, 100000, p);
    EXPECT_GT(b.bit_score, a.bit_score);
    EXPECT_LT(b.e_value, a.e_value);
  }
}

class SearchFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(99);
    records_ = testing::random_records(rng, 40, 300, 3000);
    engine_ = std::make_unique<Engine>(testing::make_engine(dir_.path(), records_, kMask, 1));
  }

  TempDir dir_;
  std::vector<FastaRecord> records_;
  std::unique_ptr<Engine> engine_;
};

TEST_F(SearchFixture, VerbatimQueryFindsItsSource) {
  const auto& src = records_[17].sequence;
  const std::string query = src.substr(100, 150);
  const auto result = search(*engine_, query, "q", SearchParams{});
  ASSERT_FALSE(result.hsps.empty());
  const auto& top = result.hsps.front();
  EXPECT_EQ(top.seq_id, 17u);
  EXPECT_EQ(top.raw_score, 150);
  EXPECT_EQ(top.query_begin, 0u);
  EXPECT_EQ(top.query_end, 150u);
  EXPECT_EQ(top.bank_begin, 100u);
  EXPECT_EQ(top.bank_end, 250u);
  EXPECT_EQ(top.query_aligned, query);
  EXPECT_EQ(result.subjects.front().name, "seq17");
  EXPECT_EQ(result.query_length, 150u);
  EXPECT_EQ(result.bank_name, "bank");
}

TEST_F(SearchFixture, MutatedQueryRanksItsSourceFirst) {
  std::mt19937_64 rng(5);
  for (std::uint32_t id : {3u, 11u, 29u}) {
    const auto& src = records_[id].sequence;
    const auto query = testing::mutate(rng, src.substr(0, 280), 0.02);
    const auto result = search(*engine_, query, "m", SearchParams{});
    ASSERT_FALSE(result.hsps.empty()) << id;
    EXPECT_EQ(result.hsps.front().seq_id, id);
  }
}

TEST_F(SearchFixture, UnrelatedQueryHasNoHits) {
  std::mt19937_64 rng(1234);
  std::vector<std::string> bank;
  for (const auto& r : records_) bank.push_back(r.sequence);
  for (int attempt = 0; attempt < 50; ++attempt) {
    const auto query = testing::random_bases(rng, 60);
    bool seeded = false;
    for (const auto& w : process_query(query, kMask))
      if (!testing::scan_occurrences(bank, kMask.pattern(), w.word.value).empty()) seeded = true;
    if (seeded) continue;
    const auto result = search(*engine_, query, "none", SearchParams{});
    EXPECT_TRUE(result.hsps.empty());
    EXPECT_TRUE(result.subjects.empty());
    return;
  }
  FAIL() << "no unseeded random query found";
}

TEST_F(SearchFixture, SharedRepeatCoveringAWindowIsFound) {
  std::mt19937_64 rng(77);
  SearchParams p;
  p.max_results = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint32_t id = rng() % records_.size();
    const auto& src = records_[id].sequence;
    const std::uint32_t window = (rng() % (src.size() / 18 - 1)) * 18;
    const std::uint32_t lead = rng() % 18, tail = 18 + rng() % 18;
    const std::uint32_t start = window >= lead ? window - lead : 0;
    const std::uint32_t end = std::min<std::uint32_t>(src.size(), window + tail);
    if (end - start < 36) continue;
    const std::string query = testing::random_bases(rng, 40) + src.substr(start, end - start) + testing::random_bases(rng, 40);
    const auto result = search(*engine_, query, "r", p);
    const std::uint32_t q_window = 40 + (window - start);
    bool covered = false;
    for (const auto& h : result.hsps)
      if (h.seq_id == id && h.bank_begin <= window && h.bank_end >= window + 18 && h.query_begin <= q_window &&
          h.query_end >= q_window + 18)
        covered = true;
    EXPECT_TRUE(covered) << "trial " << trial;
  }
}

TEST_F(SearchFixture, DeterministicAndValidated) {
  const std::string query = records_[2].sequence.substr(0, 200);
  EXPECT_EQ(search(*engine_, query, "q", SearchParams{}), search(*engine_, query, "q", SearchParams{}));
  SearchParams bad;
  bad.min_hsp_length = 5;
  EXPECT_THROW(search(*engine_, query, "q", bad), ConfigError);
  EXPECT_THROW(search(*engine_, "ACGT", "q", SearchParams{}), QueryTooShortError);
}

TEST(OrderResults, ScoreThenEvalueThenPosition) {
  std::vector<ResultHsp> hsps(4);
  hsps[0].raw_score = 10; hsps[0].e_value = 1; hsps[0].seq_id = 2;
  hsps[1].raw_score = 20; hsps[1].e_value = 1;
  hsps[2].raw_score = 10; hsps[2].e_value = 0.5; hsps[2].seq_id = 5;
  hsps[3].raw_score = 10; hsps[3].e_value = 1; hsps[3].seq_id = 1;
  order_result_hsps(hsps);
  EXPECT_EQ(hsps[0].raw_score, 20);
  EXPECT_EQ(hsps[1].seq_id, 5u);
  EXPECT_EQ(hsps[2].seq_id, 1u);
  EXPECT_EQ(hsps[3].seq_id, 2u);
}

}  // namespace
}  // namespace genoogle
