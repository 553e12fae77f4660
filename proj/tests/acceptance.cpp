// Acceptance run: one PASS/FAIL line per criterion.
// Exit status is 0 once every criterion has been evaluated; with --strict it is
// the number of failed criteria instead.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "platsim/harness/artifacts.hpp"
#include "platsim/metrics/metrics.hpp"

using namespace platsim;

namespace {

// Pinned tolerances and limits.
constexpr double kUtilityTol = 1e-9;
constexpr double kClosedFormTol = 1e-9;
constexpr double kCrrGapRandomPop = 0.20;
constexpr double kFairnessLift = 0.05;
constexpr double kBucketGap = 0.20;
constexpr double kMonotoneSlack = 0.05;  // allowed dip between adjacent buckets
constexpr int kRewardWinsNeeded = 4;
constexpr double kBlockShare = 0.90;
constexpr double kAlignmentJsd = 0.05;
constexpr double kDeskRunSeconds = 60.0;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << x;
  return os.str();
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

SimConfig desk(std::uint64_t seed) {
  SimConfig c;  // defaults are the desk setup: 100 users, 50 creators, 100 steps
  c.seed = seed;
  return c;
}

MetricsReport run_report(const SimConfig& c) {
  Engine e(c, dataset_for(c));
  e.run();
  return e.report();
}

double mean_crr(const std::function<void(SimConfig&)>& tweak) {
  double total = 0.0;
  for (auto s : kSeeds) {
    auto c = desk(s);
    tweak(c);
    total += run_report(c).crr;
  }
  return total / static_cast<double>(kSeeds.size());
}

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("platsim_acceptance_" + std::to_string(::getpid()) + "_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EventLog random_log(RngStream& rng, std::uint32_t items, Step steps, std::uint32_t users) {
  EventLog log;
  log.register_items_up_to(items);
  for (Step s = 1; s <= steps; ++s) {
    std::vector<InteractionEvent> batch;
    for (std::uint32_t u = 0; u < users; ++u)
      for (std::uint32_t i = 0; i < items; ++i) {
        if (!rng.bernoulli(0.15)) continue;
        batch.push_back({s, UserId(u), ItemId(i), true, rng.bernoulli(0.3)});
      }
    log.append_batch(batch);
  }
  return log;
}

Outcome asymmetry() {
  const auto t0 = Clock::now();
  RngStream rng(101, StreamDomain::Test, 1);
  int leaks = 0, violations = 0, foreign = 0;
  for (int round = 0; round < 100; ++round) {
    const auto log = random_log(rng, 30, 10, 6);
    std::vector<ItemId> owned;
    for (std::uint32_t i = 0; i < 30; ++i)
      if (rng.bernoulli(0.3)) owned.push_back(ItemId(i));
    for (int q = 0; q < 100; ++q) {
      const ItemId item(static_cast<std::uint32_t>(rng.below(30)));
      if (std::binary_search(owned.begin(), owned.end(), item)) {
        (void)creator_view(log, CreatorId(0), owned, item, 0, 10);
        continue;
      }
      ++foreign;
      try {
        (void)creator_view(log, CreatorId(0), owned, item, 0, 10);
        ++leaks;
      } catch (const SimError& e) {
        violations += e.code() == Errc::AsymmetryViolation;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {leaks == 0 && violations == foreign && secs < 5.0,
          "10000 queries, " + std::to_string(foreign) + " foreign, " + std::to_string(leaks) + " leaks, " +
              num(secs, 2) + " s"};
}

Outcome utility_oracle() {
  const auto t0 = Clock::now();
  RngStream rng(102, StreamDomain::Test, 2);
  constexpr std::uint32_t kItems = 40;
  constexpr Step kSteps = 50;
  CreatorSeed seed;
  seed.history_genre_counts.assign(3, 0.0);
  seed.skill.assign(3, 1.0 / 3);
  seed.audience.assign(3, std::nullopt);
  CreatorRuntime c(seed, 1.0, 0.5, 5);
  EventLog log;
  log.register_items_up_to(kItems);
  std::vector<Step> created(kItems);
  std::uint32_t next = 0;
  int checked = 0;
  double worst = 0.0;
  for (Step s = 1; s <= kSteps; ++s) {
    for (int k = 0; k < 2 && next < kItems; ++k, ++next) {
      ItemRecord r;
      r.id = ItemId(next);
      r.creator = CreatorId(0);
      r.genre = GenreId(next % 3);
      r.created = s;
      created[next] = s;
      c.add_created_item(r);
    }
    std::vector<InteractionEvent> batch;
    for (std::uint32_t u = 0; u < 10; ++u)
      for (std::uint32_t i = 0; i < next; ++i)
        if (rng.bernoulli(0.2)) batch.push_back({s, UserId(u), ItemId(i), true, rng.bernoulli(0.35)});
    log.append_batch(batch);
    c.update_feedback_memory(batch, s);
    for (int q = 0; q < 20; ++q, ++checked) {
      const ItemId item(static_cast<std::uint32_t>(rng.below(next)));
      const auto t = log.tally(item, created[item.value], s);
      const double expect = (0.5 * static_cast<double>(t.exposures) + 0.5 * static_cast<double>(t.clicks)) /
                            static_cast<double>(s - created[item.value] + 1);
      worst = std::max(worst, std::abs(c.item_utility(item, s) - expect));
    }
  }
  const double secs = seconds_since(t0);
  return {checked == 1000 && worst <= kUtilityTol && secs < 5.0,
          std::to_string(checked) + " pairs, max |diff| " + sci(worst) + ", " + num(secs, 2) + " s"};
}

Outcome determinism() {
  const auto t0 = Clock::now();
  auto cfg = desk(7);
  cfg.reranker = "pmmf";
  const auto data = dataset_for(cfg);
  std::string events, metrics;
  bool same = true;
  for (std::size_t w : {1u, 4u, 8u}) {
    const auto dir = scratch("det" + std::to_string(w));
    Engine e(cfg, data, RunOptions{w, nullptr, nullptr});
    e.run();
    write_run(e, dir);
    const auto ev = slurp(dir / kEventsFile), me = slurp(dir / kMetricsFile);
    if (w == 1) {
      events = ev;
      metrics = me;
    } else {
      same = same && ev == events && me == metrics;
    }
    fs::remove_all(dir);
  }
  const double secs = seconds_since(t0);
  return {same && !events.empty() && secs < 120.0,
          std::string("workers 1/4/8 ") + (same ? "identical" : "differ") + ", " + num(secs, 1) + " s"};
}

Outcome closed_forms() {
  std::vector<GenreId> genre;
  EventLog uniform;
  uniform.register_items_up_to(14);
  for (std::uint32_t g = 0; g < 14; ++g) {
    genre.push_back(GenreId(g));
    uniform.append({1, UserId(0), ItemId(g), true, false});
  }
  const double cgd_uniform = content_genre_diversity(uniform, genre, 14, 1, 1);
  EventLog single;
  single.register_items_up_to(14);
  single.append({1, UserId(0), ItemId(3), true, false});
  single.append({2, UserId(0), ItemId(3), true, false});
  const double cgd_single = content_genre_diversity(single, genre, 14, 1, 2);
  const std::vector<double> p{0.2, 0.5, 0.3}, q{0.6, 0.1, 0.3}, a{1, 0}, b{0, 1};
  const double sym = std::abs(js_divergence(p, q) - js_divergence(q, p));
  const double self = js_divergence(p, p);
  const double disjoint = js_divergence(a, b);
  const bool ok = std::abs(cgd_uniform - std::log(14.0)) <= kClosedFormTol && cgd_single == 0.0 &&
                  sym <= kClosedFormTol && self == 0.0 && std::abs(disjoint - 1.0) <= kClosedFormTol;
  return {ok, "cgd(uniform) " + num(cgd_uniform, 9) + ", cgd(single) " + num(cgd_single) + ", jsd(p,p) " +
                  num(self) + ", jsd(disjoint) " + num(disjoint, 9)};
}

Outcome random_vs_pop() {
  const auto t0 = Clock::now();
  const double random = mean_crr([](SimConfig& c) { c.ranker = "random"; });
  const double pop = mean_crr([](SimConfig& c) { c.ranker = "pop"; });
  const double secs = seconds_since(t0);
  return {random - pop >= kCrrGapRandomPop && secs < 600.0,
          "CRR random " + num(random) + " pop " + num(pop) + " gap " + num(random - pop) + ", " + num(secs, 1) + " s"};
}

Outcome fairness_retention() {
  const auto t0 = Clock::now();
  const double none = mean_crr([](SimConfig& c) { c.reranker = "none"; });
  const double pmmf = mean_crr([](SimConfig& c) { c.reranker = "pmmf"; });
  const double fairrec = mean_crr([](SimConfig& c) { c.reranker = "fairrec"; });
  const double secs = seconds_since(t0);
  const bool ok = pmmf - none >= kFairnessLift && fairrec - none >= kFairnessLift && secs < 900.0;
  return {ok, "CRR none " + num(none) + " pmmf " + num(pmmf) + " (+" + num(pmmf - none) + ") fairrec " +
                  num(fairrec) + " (+" + num(fairrec - none) + "), " + num(secs, 1) + " s"};
}

Outcome diversity() {
  const auto t0 = Clock::now();
  double none = 0.0, mmr = 0.0;
  for (auto s : kSeeds) {
    auto c = desk(s);
    none += run_report(c).cgd;
    c.reranker = "mmr";
    mmr += run_report(c).cgd;
  }
  none /= static_cast<double>(kSeeds.size());
  mmr /= static_cast<double>(kSeeds.size());
  const double secs = seconds_since(t0);
  return {mmr >= none && secs < 600.0, "CGD none " + num(none) + " mmr " + num(mmr) + ", " + num(secs, 1) + " s"};
}

Outcome prospect_shape() {
  const auto t0 = Clock::now();
  const auto r = run_report(desk(1));
  const auto& t = r.explore_exploit;
  bool monotone = t.size() == 5;
  std::string shares;
  for (std::size_t b = 0; b < t.size(); ++b) {
    shares += (b ? " " : "") + t[b].label + "=" + num(t[b].exploit, 3);
    if (t[b].empty()) monotone = false;
    if (b > 0 && t[b].exploit < t[b - 1].exploit - kMonotoneSlack) monotone = false;
  }
  const double gap = t.size() == 5 ? t[4].exploit - t[0].exploit : 0.0;
  const double secs = seconds_since(t0);
  return {monotone && gap >= kBucketGap && secs < 300.0,
          "exploit " + shares + ", VH-VL " + num(gap, 3) + ", " + num(secs, 1) + " s"};
}

Outcome bounded_rationality() {
  const auto t0 = Clock::now();
  int wins = 0;
  std::string detail;
  for (auto s : kSeeds) {
    auto c = desk(s);
    const auto partial = run_report(c).rewards();
    c.creator.full_information = true;
    const auto full = run_report(c).rewards();
    const double p = std::accumulate(partial.begin(), partial.end(), 0.0);
    const double f = std::accumulate(full.begin(), full.end(), 0.0);
    wins += f >= p;
    detail += " " + num(f, 0) + "/" + num(p, 0);
  }
  const double secs = seconds_since(t0);
  return {wins >= kRewardWinsNeeded && secs < 600.0,
          "full>=partial in " + std::to_string(wins) + "/5 (full/partial:" + detail + "), " + num(secs, 1) + " s"};
}

Outcome ranker_sanity() {
  const auto t0 = Clock::now();
  Catalog cat;
  for (int i = 0; i < 4; ++i) cat.add(ItemRecord{});
  EventLog log;
  const std::vector<Interaction> train{{UserId(0), ItemId(0)}, {UserId(1), ItemId(0)}, {UserId(1), ItemId(1)},
                                       {UserId(2), ItemId(2)}, {UserId(3), ItemId(2)}, {UserId(3), ItemId(3)}};
  const std::vector<Interaction> held{{UserId(0), ItemId(1)}, {UserId(2), ItemId(3)}};
  std::string detail;
  bool ok = true;
  for (auto loss : {MatrixFactorization::Loss::Pointwise, MatrixFactorization::Loss::Pairwise}) {
    MatrixFactorization mf(loss, MfConfig{}, 11);
    for (Step n = 1; n <= 60; ++n) mf.retrain({cat, log, train, 4, n});
    int good = 0, total = 0;
    for (const auto& [u, i] : held)
      for (std::uint32_t v = 0; v < 4; ++v)
        for (std::uint32_t j = 0; j < 4; ++j) {
          if (j / 2 == v / 2) continue;
          ++total;
          good += mf.raw_score(u, i, GenreId(0)) > mf.raw_score(UserId(v), ItemId(j), GenreId(0));
        }
    const double share = static_cast<double>(good) / total;
    ok = ok && share >= kBlockShare;
    detail += mf.name() + " " + num(share, 3) + " ";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 30.0, detail + num(secs, 2) + " s"};
}

Outcome alignment_machinery() {
  RngStream rng(111, StreamDomain::Test, 3);
  std::vector<double> hist(14);
  for (auto& x : hist) x = 0.2 + rng.uniform();
  auto draw = [&] {
    std::vector<ItemGenreRow> items;
    for (int k = 0; k < 10000; ++k)
      items.push_back({CreatorId(static_cast<std::uint32_t>(rng.below(50))),
                       GenreId(static_cast<std::uint32_t>(rng.categorical(hist)))});
    return items;
  };
  const auto data = draw(), sim = draw();
  const auto a = creation_alignment(sim, data, 14);
  const auto same = creation_alignment(data, data, 14);
  return {a.preference_jsd < kAlignmentJsd && same.preference_jsd == 0.0 && same.diversity_jsd == 0.0,
          "sampled preference JSD " + num(a.preference_jsd, 5) + ", identical (" + num(same.preference_jsd) + ", " +
              num(same.diversity_jsd) + ")"};
}

Outcome desk_runtime() {
  auto c = desk(1);
  c.reranker = "pmmf";
  const auto data = dataset_for(c);
  const auto t0 = Clock::now();
  Engine e(c, data, RunOptions{1, nullptr, nullptr});
  e.run();
  (void)e.report();
  const double secs = seconds_since(t0);
  return {secs < kDeskRunSeconds, "MF + pmmf, 1 worker: " + num(secs, 2) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"asymmetry enforcement", asymmetry},
      {"utility oracle", utility_oracle},
      {"determinism across workers", determinism},
      {"metric closed forms", closed_forms},
      {"random vs pop retention", random_vs_pop},
      {"fairness raises retention", fairness_retention},
      {"mmr raises diversity", diversity},
      {"exploitation rises with reward", prospect_shape},
      {"full information earns more", bounded_rationality},
      {"ranker block structure", ranker_sanity},
      {"alignment machinery", alignment_machinery},
      {"desk-scale runtime", desk_runtime},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return strict ? failed : 0;
}
