#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "platsim/core/catalog.hpp"
#include "platsim/core/config.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/core/rng.hpp"
#include "support.hpp"

using namespace platsim;
using testing_support::code_of;

namespace {

InteractionEvent ev(Step s, std::uint32_t u, std::uint32_t i, bool exposed, bool clicked) {
  return {s, UserId(u), ItemId(i), exposed, clicked};
}

// Random log over `items` items; steps ascend, one event per (step, user, item).
EventLog random_log(RngStream& rng, std::uint32_t items, Step steps, std::uint32_t users) {
  EventLog log;
  log.register_items_up_to(items);
  for (Step s = 1; s <= steps; ++s) {
    std::vector<InteractionEvent> batch;
    for (std::uint32_t u = 0; u < users; ++u) {
      std::set<std::uint32_t> seen;
      const auto n = rng.below(4);
      for (std::uint64_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::uint32_t>(rng.below(items));
        if (!seen.insert(i).second) continue;
        const bool exposed = rng.bernoulli(0.9);
        batch.push_back(ev(s, u, i, exposed, exposed && rng.bernoulli(0.3)));
      }
    }
    log.append_batch(batch);
  }
  return log;
}

Tally brute_tally(const EventLog& log, ItemId item, Step from, Step to) {
  Tally t;
  for (const auto& e : log.events()) {
    if (e.item != item || e.step < from || e.step > to) continue;
    t.exposures += e.exposed;
    t.clicks += e.clicked;
  }
  return t;
}

}  // namespace

TEST(EventLog, SingleAppend) {
  EventLog log;
  log.register_items_up_to(1);
  log.append(ev(1, 0, 0, true, true));
  EXPECT_EQ(log.size(), 1u);
}

TEST(EventLog, StepRegressionIsOutOfOrder) {
  EventLog log;
  log.register_items_up_to(1);
  log.append(ev(1, 0, 0, true, false));
  EXPECT_EQ(code_of([&] { log.append(ev(0, 0, 0, true, false)); }), Errc::OutOfOrder);
}

TEST(EventLog, ClickWithoutExposureIsIllegal) {
  EventLog log;
  log.register_items_up_to(1);
  EXPECT_EQ(code_of([&] { log.append(ev(1, 0, 0, false, true)); }), Errc::IllegalClick);
}

TEST(EventLog, DuplicateTripleRejected) {
  EventLog log;
  log.register_items_up_to(1);
  log.append(ev(1, 0, 0, true, false));
  EXPECT_EQ(code_of([&] { log.append(ev(1, 0, 0, true, false)); }), Errc::DuplicateEvent);
}

TEST(EventLog, UnknownItem) {
  EventLog log;
  EXPECT_EQ(code_of([&] { log.append(ev(1, 0, 3, true, false)); }), Errc::UnknownItem);
  EXPECT_EQ(code_of([&] { (void)log.tally(ItemId(3), 0, 5); }), Errc::UnknownItem);
}

TEST(EventLog, TallyExample) {
  // exposed at {3, 3, 4}, clicked at {3}
  EventLog log;
  log.register_items_up_to(2);
  log.append(ev(3, 0, 0, true, true));
  log.append(ev(3, 1, 0, true, false));
  log.append(ev(3, 1, 1, true, true));
  log.append(ev(4, 0, 0, true, false));
  const auto t = log.tally(ItemId(0), 3, 4);
  EXPECT_EQ(t.exposures, 3);
  EXPECT_EQ(t.clicks, 1);
  EXPECT_EQ(log.tally(ItemId(0), 3, 4), brute_tally(log, ItemId(0), 3, 4));
}

TEST(EventLog, EmptyRange) {
  EventLog log;
  log.register_items_up_to(1);
  log.append(ev(2, 0, 0, true, true));
  EXPECT_EQ(log.tally(ItemId(0), 5, 4), Tally{});
  EXPECT_EQ(log.tally(ItemId(0), 3, 9), Tally{});
}

TEST(EventLog, TallyMatchesFullScanAndIsAdditive) {
  RngStream rng(11, StreamDomain::Test, 0);
  const auto log = random_log(rng, 12, 30, 8);
  for (std::uint32_t i = 0; i < 12; ++i) {
    Tally sum;
    for (Step s = 0; s <= 31; ++s) sum += log.tally(ItemId(i), s, s);
    EXPECT_EQ(sum, log.tally(ItemId(i), 0, 31));
    for (int k = 0; k < 20; ++k) {
      const auto a = static_cast<Step>(rng.below(32)), b = static_cast<Step>(rng.below(32));
      EXPECT_EQ(log.tally(ItemId(i), a, b), brute_tally(log, ItemId(i), a, b));
    }
  }
}

TEST(EventLog, ReplayRebuildsIdenticalIndex) {
  RngStream rng(5, StreamDomain::Test, 1);
  const auto log = random_log(rng, 10, 15, 6);
  EventLog replay;
  replay.register_items_up_to(10);
  for (const auto& e : log.events()) replay.append(e);
  for (std::uint32_t i = 0; i < 10; ++i) {
    const auto a = log.offsets_of(ItemId(i)), b = replay.offsets_of(ItemId(i));
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  for (Step s = 0; s <= 16; ++s) EXPECT_EQ(log.events_at(s).size(), replay.events_at(s).size());
}

TEST(EventLog, CsvRoundTrip) {
  RngStream rng(2, StreamDomain::Test, 0);
  const auto log = random_log(rng, 6, 10, 4);
  std::stringstream ss;
  log.write_csv(ss);
  EXPECT_EQ(ss.str().rfind("step,user_id,item_id,exposed,clicked\n", 0), 0u);
  const auto back = EventLog::read_csv(ss);
  ASSERT_EQ(back.size(), log.size());
  for (std::size_t k = 0; k < log.size(); ++k) EXPECT_EQ(back.events()[k], log.events()[k]);
}

TEST(EventLog, TruncatedCsvIsCorrupt) {
  std::stringstream ss("step,user_id,item_id,exposed,clicked\n1,0,0,1,1\n2,0,0,1");
  EXPECT_EQ(code_of([&] { (void)EventLog::read_csv(ss); }), Errc::CorruptLog);
}

TEST(CreatorView, OwnedItemMatchesTally) {
  EventLog log;
  log.register_items_up_to(2);
  log.append(ev(1, 0, 1, true, true));
  log.append(ev(2, 3, 1, true, false));
  const std::vector<ItemId> owned{ItemId(1)};
  EXPECT_EQ(creator_view(log, CreatorId(0), owned, ItemId(1), 0, 5), log.tally(ItemId(1), 0, 5));
}

TEST(CreatorView, ForeignItemIsAsymmetryViolation) {
  EventLog log;
  log.register_items_up_to(2);
  const std::vector<ItemId> owned{ItemId(1)};
  EXPECT_EQ(code_of([&] { (void)creator_view(log, CreatorId(0), owned, ItemId(0), 0, 5); }),
            Errc::AsymmetryViolation);
}

TEST(CreatorView, EmptyOwnershipRejectsEverything) {
  EventLog log;
  log.register_items_up_to(3);
  for (std::uint32_t i = 0; i < 3; ++i)
    EXPECT_EQ(code_of([&] { (void)creator_view(log, CreatorId(0), {}, ItemId(i), 0, 1); }),
              Errc::AsymmetryViolation);
}

TEST(CreatorView, RandomizedOwnershipNeverLeaks) {
  RngStream rng(77, StreamDomain::Test, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto log = random_log(rng, 20, 8, 5);
    std::vector<ItemId> owned;
    for (std::uint32_t i = 0; i < 20; ++i)
      if (rng.bernoulli(0.3)) owned.push_back(ItemId(i));
    for (int q = 0; q < 50; ++q) {
      const ItemId item(static_cast<std::uint32_t>(rng.below(20)));
      const bool mine = std::binary_search(owned.begin(), owned.end(), item);
      if (mine) {
        EXPECT_EQ(creator_view(log, CreatorId(1), owned, item, 0, 9), log.tally(item, 0, 9));
      } else {
        EXPECT_EQ(code_of([&] { (void)creator_view(log, CreatorId(1), owned, item, 0, 9); }),
                  Errc::AsymmetryViolation);
      }
    }
  }
}

TEST(Rng, SameKeyReproduces) {
  RngStream a(42, StreamDomain::User, 7), b(42, StreamDomain::User, 7);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DistinctIdsLookIndependent) {
  RngStream a(42, StreamDomain::User, 1), b(42, StreamDomain::User, 2);
  // Pearson correlation of 20k uniform pairs; |r| under 0.03 is ~4 sd.
  const int n = 20000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int k = 0; k < n; ++k) {
    const double x = a.uniform(), y = b.uniform();
    sa += x, sb += y, sab += x * y, saa += x * x, sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double r = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::abs(r), 0.03);
  EXPECT_NEAR(sa / n, 0.5, 0.01);
}

TEST(Rng, DomainsSeparateStreams) {
  RngStream a(1, StreamDomain::User, 0), b(1, StreamDomain::Creator, 0);
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(Rng, BelowStaysInRange) {
  RngStream r(3, StreamDomain::Test, 0);
  for (int k = 0; k < 1000; ++k) EXPECT_LT(r.below(7), 7u);
}

TEST(Config, DefaultsMatchDeskSetup) {
  const SimConfig c;
  EXPECT_EQ(c.n_steps, 100);
  EXPECT_EQ(c.warmup, 10);
  EXPECT_EQ(c.list_length, 5);
  EXPECT_EQ(c.retrain_period, 5);
  EXPECT_EQ(c.timeliness_window, 20);
  EXPECT_EQ(c.departure_threshold, 5);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RangeViolationsAreConfigErrors) {
  for (const char* text : {"warmup = 0", "warmup = 200", "list_length = 0", "retrain_period = 0",
                           "beta = 1.5", "departure_threshold = 0", "no_such_key = 1",
                           "n_steps = abc", "ranker"}) {
    EXPECT_EQ(code_of([&] { (void)parse_config_text(text); }), Errc::ConfigError) << text;
  }
}

TEST(Config, TextRoundTrip) {
  auto c = parse_config_text("seed = 9\nranker = bpr\nreranker = pmmf # trailing\nbeta = 0.25\n");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.ranker, "bpr");
  const auto again = parse_config_text(c.to_text());
  EXPECT_EQ(again.to_text(), c.to_text());
  EXPECT_DOUBLE_EQ(again.beta, 0.25);
}

TEST(Catalog, IdsAreDenseAndIncreasing) {
  Catalog cat;
  for (int k = 0; k < 5; ++k) {
    ItemRecord r;
    r.content.genre = GenreId(static_cast<std::uint32_t>(k % 3));
    EXPECT_EQ(cat.add(r), ItemId(static_cast<std::uint32_t>(k)));
  }
  EXPECT_EQ(cat[ItemId(4)].genre, GenreId(1));
  EXPECT_EQ(code_of([&] { (void)cat[ItemId(9)]; }), Errc::UnknownItem);
}
