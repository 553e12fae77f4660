#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "platsim/core/ids.hpp"
#include "platsim/ingest/dataset.hpp"

namespace platsim {

struct CreatorSeed {
  CreatorId id;
  std::string name;
  std::int64_t followers = 0;
  std::vector<std::size_t> history;  // positions in Dataset::items
  std::vector<double> history_genre_counts;
  double activity = 0.0;  // items per day
  std::vector<double> skill;
  std::vector<std::optional<double>> audience;  // nullopt: genre never created
  std::string social_identity;
  std::string intrinsic_motivation;
};

struct UserSeed {
  UserId id;
  std::vector<double> preference;
  double activity = 0.0;  // visit probability per step
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Profile, activity and initial beliefs of every creator, in dataset order.
inline std::vector<CreatorSeed> init_creator_seeds(const Dataset& d) {
  const std::size_t n_genres = d.genre_count();
  std::vector<CreatorSeed> seeds(d.creators.size());
  std::vector<std::int64_t> interactions_per_item(d.items.size(), 0);
  for (const auto& in : d.interactions) ++interactions_per_item[d.item_index.at(in.item_id)];

  for (std::size_t c = 0; c < d.creators.size(); ++c) {
    seeds[c].id = CreatorId(static_cast<std::uint32_t>(c));
    seeds[c].name = d.creators[c].name;
    seeds[c].followers = d.creators[c].followers;
    seeds[c].history_genre_counts.assign(n_genres, 0.0);
  }
  for (std::size_t i = 0; i < d.items.size(); ++i) {
    auto& s = seeds[d.creator_index.at(d.items[i].creator_id)];
    s.history.push_back(i);
    s.history_genre_counts[d.items[i].genre.value] += 1.0;
  }

  std::vector<double> known_activity;
  for (auto& s : seeds) {
    s.skill.assign(n_genres, 0.0);
    s.audience.assign(n_genres, std::nullopt);
    if (s.history.empty()) {
      std::fill(s.skill.begin(), s.skill.end(), 1.0 / static_cast<double>(n_genres));
      continue;
    }
    const auto total = static_cast<double>(s.history.size());
    for (std::size_t g = 0; g < n_genres; ++g) s.skill[g] = s.history_genre_counts[g] / total;

    std::vector<double> sum(n_genres, 0.0);
    for (auto i : s.history) sum[d.items[i].genre.value] += static_cast<double>(interactions_per_item[i]);
    for (std::size_t g = 0; g < n_genres; ++g) {
      if (s.history_genre_counts[g] > 0.0) s.audience[g] = sum[g] / s.history_genre_counts[g];
    }

    std::int64_t first = d.items[s.history.front()].created_day;
    std::int64_t last = first;
    for (auto i : s.history) {
      first = std::min(first, d.items[i].created_day);
      last = std::max(last, d.items[i].created_day);
    }
    const auto span_days = static_cast<double>(last - first + 1);
    s.activity = total / span_days;
    known_activity.push_back(s.activity);
  }
  const double fallback_activity = detail::median(known_activity);
  for (auto& s : seeds)
    if (s.history.empty()) s.activity = fallback_activity;

  std::vector<double> followers;
  for (const auto& s : seeds) followers.push_back(static_cast<double>(s.followers));
  const double follower_median = detail::median(followers);
  for (auto& s : seeds) {
    const auto top = static_cast<std::size_t>(
        std::max_element(s.skill.begin(), s.skill.end()) - s.skill.begin());
    std::string genre = d.genres[top];
    std::transform(genre.begin(), genre.end(), genre.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    s.social_identity = genre + " enthusiast";
    s.intrinsic_motivation =
        static_cast<double>(s.followers) >= follower_median ? "profit" : "sharing";
  }
  return seeds;
}

inline constexpr double kPreferenceSmoothing = 0.1;

/// Long-term genre preference (add-alpha smoothed) and visit probability of every user.
inline std::vector<UserSeed> init_user_seeds(const Dataset& d,
                                             double alpha = kPreferenceSmoothing) {
  const std::size_t n_genres = d.genre_count();
  std::vector<std::vector<double>> counts(d.users.size(), std::vector<double>(n_genres, 0.0));
  std::vector<std::int64_t> n(d.users.size(), 0), first(d.users.size(), 0), last(d.users.size(), 0);
  for (const auto& in : d.interactions) {
    const auto u = d.user_index.at(in.user_id);
    counts[u][d.items[d.item_index.at(in.item_id)].genre.value] += 1.0;
    if (n[u] == 0) {
      first[u] = last[u] = in.day;
    } else {
      first[u] = std::min(first[u], in.day);
      last[u] = std::max(last[u], in.day);
    }
    ++n[u];
  }

  std::vector<UserSeed> seeds(d.users.size());
  std::vector<double> rate(d.users.size(), 0.0);
  double max_rate = 0.0;
  std::vector<double> known;
  for (std::size_t u = 0; u < d.users.size(); ++u) {
    seeds[u].id = UserId(static_cast<std::uint32_t>(u));
    seeds[u].preference.assign(n_genres, 1.0 / static_cast<double>(n_genres));
    if (n[u] == 0) continue;
    const double denom = static_cast<double>(n[u]) + alpha * static_cast<double>(n_genres);
    for (std::size_t g = 0; g < n_genres; ++g) seeds[u].preference[g] = (counts[u][g] + alpha) / denom;
    rate[u] = static_cast<double>(n[u]) / static_cast<double>(last[u] - first[u] + 1);
    max_rate = std::max(max_rate, rate[u]);
  }
  for (std::size_t u = 0; u < d.users.size(); ++u) {
    if (n[u] > 0) {
      seeds[u].activity = max_rate > 0.0 ? rate[u] / max_rate : 0.0;
      known.push_back(seeds[u].activity);
    }
  }
  const double fallback = detail::median(known);
  for (std::size_t u = 0; u < d.users.size(); ++u)
    if (n[u] == 0) seeds[u].activity = fallback;
  return seeds;
}

}  // namespace platsim
