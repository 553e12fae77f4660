#include <gtest/gtest.h>

#include <set>

#include "platsim/rerank/rerank.hpp"
#include "support.hpp"

using namespace platsim;

namespace {

ScoredItem si(std::uint32_t item, std::uint32_t creator, std::uint32_t genre, double score) {
  return {ItemId(item), CreatorId(creator), GenreId(genre), 0, score};
}

std::vector<std::uint32_t> ids(const std::vector<ScoredItem>& v) {
  std::vector<std::uint32_t> out;
  for (const auto& s : v) out.push_back(s.item.value);
  return out;
}

// relevance order: 0 > 1 > ... ; creators and genres cycle
std::vector<ScoredItem> ladder(std::size_t n, std::uint32_t creators, std::uint32_t genres) {
  std::vector<ScoredItem> v;
  for (std::uint32_t i = 0; i < n; ++i) v.push_back(si(i, i % creators, i % genres, 1.0 - 0.05 * i));
  return v;
}

void expect_prefix_of(const std::vector<ScoredItem>& out, const std::vector<ScoredItem>& in) {
  std::set<std::uint32_t> all, seen;
  for (const auto& s : in) all.insert(s.item.value);
  for (const auto& s : out) {
    EXPECT_TRUE(all.contains(s.item.value));
    EXPECT_TRUE(seen.insert(s.item.value).second);
  }
}

}  // namespace

TEST(Mmr, LambdaOneIsRelevanceOrder) {
  const auto in = ladder(8, 3, 2);
  EXPECT_EQ(ids(mmr_rerank(in, 1.0, 5)), (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
}

TEST(Mmr, LambdaZeroSpreadsGenres) {
  const std::vector<ScoredItem> in{si(0, 0, 0, 0.9), si(1, 0, 0, 0.8), si(2, 1, 1, 0.1)};
  const auto out = mmr_rerank(in, 0.0, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NE(out[0].genre, out[1].genre);
  // all values tie at 0 first, so relevance decides the first pick
  EXPECT_EQ(out[0].item, ItemId(0));
}

TEST(Mmr, SingleSlotIsTopRelevance) {
  const auto in = ladder(6, 2, 3);
  for (double lambda : {0.0, 0.3, 0.7, 1.0}) EXPECT_EQ(mmr_rerank(in, lambda, 1)[0].item, ItemId(0));
}

TEST(FairRec, StarvedCreatorGetsFirstSlot) {
  ExposureLedger ledger(2);
  ledger.add(CreatorId(1), 100);
  const std::vector<ScoredItem> in{si(0, 1, 0, 0.9), si(1, 1, 0, 0.8), si(2, 0, 0, 0.3), si(3, 0, 0, 0.2)};
  const auto out = fairrec_rerank(in, ledger, 2, 0.5);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].item, ItemId(2));
}

TEST(FairRec, NobodyBelowThresholdIsRelevanceOrder) {
  ExposureLedger ledger(3);
  for (std::uint32_t c = 0; c < 3; ++c) ledger.add(CreatorId(c), 10);
  const auto in = ladder(9, 3, 2);
  EXPECT_EQ(ids(fairrec_rerank(in, ledger, 5, 0.5)), (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
}

TEST(FairRec, SingleCreatorIsRelevanceOrder) {
  ExposureLedger ledger(1);
  const auto in = ladder(6, 1, 2);
  EXPECT_EQ(ids(fairrec_rerank(in, ledger, 4, 0.5)), (std::vector<std::uint32_t>{0, 1, 2, 3}));
}

TEST(FairCo, ZeroLambdaIsRelevanceOrder) {
  ExposureLedger ledger(3);
  ledger.add(CreatorId(0), 50);
  const auto in = ladder(9, 3, 2);
  EXPECT_EQ(ids(fairco_rerank(in, ledger, 0.0, 4)), (std::vector<std::uint32_t>{0, 1, 2, 3}));
}

TEST(FairCo, UnderExposedOwnerFirstOnTies) {
  ExposureLedger ledger(2);
  ledger.add(CreatorId(0), 100);
  const std::vector<ScoredItem> in{si(0, 0, 0, 0.5), si(1, 1, 0, 0.5)};
  EXPECT_EQ(fairco_rerank(in, ledger, 0.5, 2)[0].item, ItemId(1));
}

TEST(FairCo, OverExposedScoresUnchanged) {
  // mean is 50: creator 0 is over, creator 1 is boosted by 0.5 * (50 - 0) / 50
  ExposureLedger ledger(2);
  ledger.add(CreatorId(0), 100);
  const std::vector<ScoredItem> in{si(0, 0, 0, 0.9), si(1, 1, 0, 0.45), si(2, 0, 0, 0.96)};
  EXPECT_EQ(ids(fairco_rerank(in, ledger, 0.5, 3)), (std::vector<std::uint32_t>{2, 1, 0}));
}

TEST(Pmmf, ZeroDualsIsRelevanceOrder) {
  const auto in = ladder(10, 5, 2);
  const std::vector<double> duals(5, 0.0);
  EXPECT_EQ(ids(pmmf_select(in, duals, 5)), (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
}

TEST(Pmmf, NeverSelectedDualAfterTenSteps) {
  ExposureLedger ledger(5);
  std::vector<double> duals(5, 0.0);
  // creator 4 never makes the list
  const std::vector<ScoredItem> selected{si(0, 0, 0, 1), si(1, 1, 0, 1), si(2, 2, 0, 1), si(3, 3, 0, 1),
                                         si(5, 0, 0, 1)};
  for (int step = 0; step < 10; ++step) pmmf_update_duals(duals, selected, ledger, 5, 0.1, 2.0);
  EXPECT_NEAR(duals[4], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(duals[0], 0.0);
}

TEST(Pmmf, DualsClampAtMax) {
  ExposureLedger ledger(5);
  std::vector<double> duals(5, 0.0);
  const std::vector<ScoredItem> selected{si(0, 0, 0, 1)};
  for (int step = 0; step < 100; ++step) pmmf_update_duals(duals, selected, ledger, 5, 0.1, 2.0);
  EXPECT_DOUBLE_EQ(duals[4], 2.0);
}

TEST(Pmmf, SlightlyWorseCreatorKeepsExposure) {
  // creator 1's items trail creator 0's by 0.05; K = 3 with three items each
  std::vector<ScoredItem> in;
  for (std::uint32_t i = 0; i < 3; ++i) in.push_back(si(i, 0, 0, 1.0 - 0.01 * i));
  for (std::uint32_t i = 3; i < 6; ++i) in.push_back(si(i, 1, 0, 0.95 - 0.01 * i));
  ExposureLedger ledger(2);
  std::vector<double> duals(2, 0.0), none(2, 0.0);
  double pmmf_share = 0.0, plain_share = 0.0;
  const int steps = 300;
  for (int n = 0; n < steps; ++n) {
    for (const auto& s : pmmf_rerank(in, duals, ledger, 0.1, 2.0, 3)) pmmf_share += s.creator.value == 1;
    for (const auto& s : pmmf_select(in, none, 3)) plain_share += s.creator.value == 1;
  }
  pmmf_share /= 3.0 * steps;
  plain_share /= 3.0 * steps;
  EXPECT_DOUBLE_EQ(plain_share, 0.0);
  EXPECT_GT(pmmf_share, 0.25);
}

TEST(Rerankers, NeutralSettingsAreIdentity) {
  const auto in = ladder(12, 4, 3);
  const std::vector<std::uint32_t> expect{0, 1, 2, 3, 4};
  ExposureLedger ledger(4);
  ledger.add(CreatorId(0), 40);
  const std::vector<double> zero(4, 0.0);
  EXPECT_EQ(ids(mmr_rerank(in, 1.0, 5)), expect);
  EXPECT_EQ(ids(fairrec_rerank(in, ledger, 5, 0.0)), expect);
  EXPECT_EQ(ids(fairco_rerank(in, ledger, 0.0, 5)), expect);
  EXPECT_EQ(ids(pmmf_select(in, zero, 5)), expect);
}

TEST(Rerankers, OutputIsPermutationPrefix) {
  RngStream rng(12, StreamDomain::Test, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredItem> in;
    const auto n = 1 + rng.below(20);
    for (std::uint32_t i = 0; i < n; ++i)
      in.push_back(si(i, static_cast<std::uint32_t>(rng.below(5)), static_cast<std::uint32_t>(rng.below(4)),
                      rng.uniform()));
    ExposureLedger ledger(5);
    for (std::uint32_t c = 0; c < 5; ++c) ledger.add(CreatorId(c), static_cast<double>(rng.below(50)));
    std::vector<double> duals(5);
    for (auto& d : duals) d = rng.uniform();
    const std::size_t k = 1 + rng.below(8);
    for (const auto& out : {mmr_rerank(in, rng.uniform(), k), fairrec_rerank(in, ledger, k, rng.uniform()),
                            fairco_rerank(in, ledger, rng.uniform(), k), pmmf_select(in, duals, k)}) {
      EXPECT_EQ(out.size(), std::min<std::size_t>(k, n));
      expect_prefix_of(out, in);
    }
  }
}

TEST(Normalize, MinMaxAndConstant) {
  std::vector<ScoredItem> v{si(0, 0, 0, 3.0), si(1, 0, 0, 1.0), si(2, 0, 0, 2.0)};
  normalize_relevance(v);
  EXPECT_DOUBLE_EQ(v[0].score, 1.0);
  EXPECT_DOUBLE_EQ(v[1].score, 0.0);
  EXPECT_DOUBLE_EQ(v[2].score, 0.5);
  std::vector<ScoredItem> flat{si(0, 0, 0, 4.0), si(1, 0, 0, 4.0)};
  normalize_relevance(flat);
  EXPECT_DOUBLE_EQ(flat[0].score, 1.0);
}
