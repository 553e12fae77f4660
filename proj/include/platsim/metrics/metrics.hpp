#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "platsim/core/catalog.hpp"
#include "platsim/core/event_log.hpp"
#include "platsim/creator/creator.hpp"

namespace platsim {

/// Clicks with step in [n0, n].
inline std::int64_t total_user_welfare(const EventLog& log, Step n0, Step n) {
  std::int64_t clicks = 0;
  for (Step s = std::max<Step>(n0, 0); s <= n; ++s)
    for (const auto& ev : log.events_at(s)) clicks += ev.clicked ? 1 : 0;
  return clicks;
}

inline double creator_retention_rate(const std::function<std::int64_t(Step)>& alive_at, Step n0,
                                     Step n) {
  const auto base = alive_at(n0);
  if (base <= 0) fail(Errc::NoCreatorsAtN0, "no creators alive at step " + std::to_string(n0));
  return static_cast<double>(alive_at(n)) / static_cast<double>(base);
}

/// Natural-log entropy of a count vector.
inline double entropy(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log(p);
  }
  return h;
}

/// Participation-weighted mean entropy of each user's exposed genres over [n0, n].
/// A user's weight is the number of steps in which they saw at least one item.
inline double content_genre_diversity(const EventLog& log, std::span<const GenreId> item_genre,
                                      std::size_t n_genres, Step n0, Step n) {
  std::vector<std::vector<double>> counts;
  std::vector<double> weight;
  std::vector<Step> last_seen;
  bool any = false;
  for (Step s = std::max<Step>(n0, 0); s <= n; ++s) {
    for (const auto& ev : log.events_at(s)) {
      if (!ev.exposed) continue;
      const auto u = ev.user.value;
      if (u >= counts.size()) {
        counts.resize(u + 1, std::vector<double>(n_genres, 0.0));
        weight.resize(u + 1, 0.0);
        last_seen.resize(u + 1, -1);
      }
      counts[u][item_genre[ev.item.value].value] += 1.0;
      if (last_seen[u] != s) {
        last_seen[u] = s;
        weight[u] += 1.0;
      }
      any = true;
    }
  }
  if (!any) fail(Errc::NoExposures, "no exposures in [" + std::to_string(n0) + ", " + std::to_string(n) + "]");
  double num = 0.0, den = 0.0;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    if (weight[u] == 0.0) continue;
    num += weight[u] * entropy(counts[u]);
    den += weight[u];
  }
  return num / den;
}

inline constexpr double kDistributionTolerance = 1e-6;

/// Jensen-Shannon divergence in bits.
inline double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.empty() || p.size() != q.size()) fail(Errc::BadDistribution, "supports differ in size");
  auto check = [](std::span<const double> d) {
    double total = 0.0;
    for (double x : d) {
      if (!(x >= 0.0) || !std::isfinite(x)) fail(Errc::BadDistribution, "negative or non-finite mass");
      total += x;
    }
    if (std::abs(total - 1.0) > kDistributionTolerance) fail(Errc::BadDistribution, "mass does not sum to 1");
  };
  check(p);
  check(q);
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(js, 0.0, 1.0);
}

inline std::vector<double> normalized(std::vector<double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total > 0.0)
    for (auto& c : counts) c /= total;
  return counts;
}

/// Genre and creator of one item, the only item facts alignment needs.
struct ItemGenreRow {
  CreatorId creator;
  GenreId genre;
};

struct Alignment {
  double preference_jsd = 0.0;
  double diversity_jsd = 0.0;
};

inline constexpr std::size_t kDiversityBins = 10;

namespace detail {

inline std::vector<double> creator_entropy_histogram(std::span<const ItemGenreRow> items,
                                                     std::size_t n_genres) {
  std::vector<std::vector<double>> per_creator;
  for (const auto& it : items) {
    if (it.creator.value >= per_creator.size())
      per_creator.resize(it.creator.value + 1, std::vector<double>(n_genres, 0.0));
    per_creator[it.creator.value][it.genre.value] += 1.0;
  }
  const double top = std::log(static_cast<double>(n_genres));
  std::vector<double> hist(kDiversityBins, 0.0);
  for (const auto& counts : per_creator) {
    if (std::accumulate(counts.begin(), counts.end(), 0.0) == 0.0) continue;
    const double h = entropy(counts);
    auto bin = top > 0.0 ? static_cast<std::size_t>(h / top * kDiversityBins) : 0;
    hist[std::min(bin, kDiversityBins - 1)] += 1.0;
  }
  return normalized(std::move(hist));
}

}  // namespace detail

/// Genre-level and creator-level divergence between simulated and dataset creations.
inline Alignment creation_alignment(std::span<const ItemGenreRow> sim, std::span<const ItemGenreRow> data,
                                    std::size_t n_genres) {
  if (sim.empty() || data.empty()) fail(Errc::EmptyItems, "alignment needs items on both sides");
  auto genre_hist = [&](std::span<const ItemGenreRow> items) {
    std::vector<double> h(n_genres, 0.0);
    for (const auto& it : items) h[it.genre.value] += 1.0;
    return normalized(std::move(h));
  };
  Alignment a;
  a.preference_jsd = js_divergence(genre_hist(sim), genre_hist(data));
  a.diversity_jsd = js_divergence(detail::creator_entropy_histogram(sim, n_genres),
                                  detail::creator_entropy_histogram(data, n_genres));
  return a;
}

/// Cumulative run reward over cumulative baseline reward, step by step.
inline std::vector<double> normalized_reward_curve(std::span<const double> run,
                                                   std::span<const double> baseline) {
  if (run.size() != baseline.size()) fail(Errc::InvalidParams, "reward series differ in length");
  std::vector<double> out;
  double r = 0.0, b = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < run.size(); ++i) {
    r += run[i];
    b += baseline[i];
    if (b <= 0.0) {
      if (r > 0.0) fail(Errc::ZeroBaseline, "baseline reward is zero at step index " + std::to_string(i));
      out.push_back(1.0);
      continue;
    }
    any = true;
    out.push_back(r / b);
  }
  if (!any && !run.empty()) fail(Errc::ZeroBaseline, "baseline never earns reward");
  return out;
}

struct Decision {
  double reward_percentile = 0.5;
  ActionKind kind = ActionKind::Exploit;
};

inline constexpr std::array<const char*, 5> kRewardBuckets = {"VL", "L", "M", "H", "VH"};

struct BucketShare {
  std::string label;
  std::size_t count = 0;
  double explore = 0.0;
  double exploit = 0.0;
  bool empty() const { return count == 0; }
};

/// Splits decisions into five equal-count reward quantiles and reports the action
/// mix in each. Ties in the percentile keep their original order.
inline std::vector<BucketShare> explore_exploit_table(std::span<const Decision> decisions) {
  std::vector<std::size_t> order(decisions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return decisions[a].reward_percentile < decisions[b].reward_percentile;
  });
  std::vector<BucketShare> table;
  const std::size_t n = decisions.size(), buckets = kRewardBuckets.size();
  for (std::size_t b = 0; b < buckets; ++b) {
    BucketShare row;
    row.label = kRewardBuckets[b];
    for (std::size_t k = b * n / buckets; k < (b + 1) * n / buckets; ++k) {
      ++row.count;
      (decisions[order[k]].kind == ActionKind::Explore ? row.explore : row.exploit) += 1.0;
    }
    if (row.count > 0) {
      row.explore /= static_cast<double>(row.count);
      row.exploit /= static_cast<double>(row.count);
    }
    table.push_back(row);
  }
  return table;
}

/// Everything needed to compute a report; all of it is persisted with a run.
struct MetricsInputs {
  const EventLog& log;
  const Catalog& catalog;
  std::size_t n_genres = 0;
  std::size_t n_creators = 0;
  std::vector<Step> departures;  // departure step of each departed creator
  std::vector<Decision> decisions;
  Step n0 = 1;
  Step n = 1;
  double beta = 0.5;
};

inline constexpr Step kCgdWindow = 10;

struct TimeseriesRow {
  Step step = 0;
  std::int64_t tuw_cum = 0;
  std::int64_t alive_creators = 0;
  double cgd_window = 0.0;
  double reward = 0.0;
};

struct MetricsReport {
  std::int64_t tuw = 0;
  double crr = 0.0;
  double cgd = 0.0;
  std::vector<TimeseriesRow> timeseries;
  Alignment alignment;
  bool has_alignment = false;
  std::vector<BucketShare> explore_exploit;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tuw"] = tuw;
    j["crr"] = crr;
    j["cgd"] = cgd;
    if (has_alignment) {
      j["alignment"] = {{"preference_jsd", alignment.preference_jsd},
                        {"diversity_jsd", alignment.diversity_jsd}};
    } else {
      j["alignment"] = nullptr;
    }
    auto& table = j["explore_exploit"] = nlohmann::json::array();
    for (const auto& b : explore_exploit) {
      table.push_back({{"bucket", b.label}, {"count", b.count}, {"explore", b.explore},
                       {"exploit", b.exploit}});
    }
    auto& ts = j["timeseries"] = nlohmann::json::array();
    for (const auto& r : timeseries) {
      ts.push_back({{"step", r.step}, {"tuw_cum", r.tuw_cum}, {"alive_creators", r.alive_creators},
                    {"cgd_window", r.cgd_window}, {"reward", r.reward}});
    }
    return j;
  }

  std::vector<double> rewards() const {
    std::vector<double> out;
    for (const auto& r : timeseries) out.push_back(r.reward);
    return out;
  }
};

inline MetricsReport compute_report(const MetricsInputs& in) {
  std::vector<GenreId> item_genre(in.catalog.size());
  for (const auto& it : in.catalog.items()) item_genre[it.id.value] = it.genre;

  auto alive_at = [&](Step s) {
    std::int64_t gone = 0;
    for (auto d : in.departures) gone += d <= s ? 1 : 0;
    return static_cast<std::int64_t>(in.n_creators) - gone;
  };

  MetricsReport r;
  r.tuw = total_user_welfare(in.log, in.n0, in.n);
  r.crr = creator_retention_rate(alive_at, in.n0, in.n);
  r.cgd = content_genre_diversity(in.log, item_genre, in.n_genres, in.n0, in.n);

  std::int64_t cum = 0;
  for (Step s = 1; s <= in.n; ++s) {
    TimeseriesRow row;
    row.step = s;
    for (const auto& ev : in.log.events_at(s)) {
      if (s >= in.n0) cum += ev.clicked ? 1 : 0;
      row.reward += in.beta * (ev.exposed ? 1.0 : 0.0) + (1.0 - in.beta) * (ev.clicked ? 1.0 : 0.0);
    }
    row.tuw_cum = cum;
    row.alive_creators = alive_at(s);
    try {
      row.cgd_window = content_genre_diversity(in.log, item_genre, in.n_genres,
                                               std::max<Step>(1, s - kCgdWindow + 1), s);
    } catch (const SimError&) {
      row.cgd_window = 0.0;
    }
    r.timeseries.push_back(row);
  }

  std::vector<ItemGenreRow> sim, data;
  for (const auto& it : in.catalog.items()) (it.historical ? data : sim).push_back({it.creator, it.genre});
  if (!sim.empty() && !data.empty()) {
    r.alignment = creation_alignment(sim, data, in.n_genres);
    r.has_alignment = true;
  }
  r.explore_exploit = explore_exploit_table(in.decisions);
  return r;
}

}  // namespace platsim
