#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "platsim/core/config.hpp"
#include "platsim/core/rng.hpp"
#include "platsim/ingest/dataset.hpp"

namespace platsim {

namespace detail {

inline const std::vector<std::string>& creator_first_names() {
  static const std::vector<std::string> names{
      "Ada",   "Ben",   "Chloe", "Dev",   "Elif",  "Farah", "Gus",   "Hana",  "Ivo",  "Jia",
      "Kofi",  "Lena",  "Mateo", "Nia",   "Omar",  "Priya", "Quinn", "Rosa",  "Sami", "Tomas",
      "Uma",   "Vik",   "Wren",  "Xia",   "Yusuf", "Zoe"};
  return names;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace detail

/// Desk-scale synthetic dataset: power-law genre popularity, long-tailed creator
/// activity and genre-concentrated creators.
inline Dataset synth_dataset(const SynthParams& p) {
  if (p.n_users < 1 || p.n_creators < 1 || p.n_genres < 1 || p.genre_skew < 0.0 ||
      p.concentration < 0.0 || p.concentration > 1.0 || p.items_median < 1.0 ||
      p.activity_sigma < 0.0 || p.span_min_days < 1 || p.span_max_days < p.span_min_days ||
      p.interactions_min < 0 || p.interactions_max < p.interactions_min || p.user_span_days < 1 ||
      p.user_favorite_genres < 1 || p.user_favorite_genres > p.n_genres || p.user_focus < 0.0 ||
      p.user_focus > 1.0) {
    fail(Errc::InvalidParams, "synthetic dataset parameters out of range");
  }
  RngStream rng(p.seed, StreamDomain::Synth, 0);
  Dataset d;
  const auto n_genres = static_cast<std::size_t>(p.n_genres);
  if (n_genres == kDefaultGenreCount) {
    d.genres = default_genres();
  } else {
    d.genres.clear();
    for (std::size_t g = 0; g < n_genres; ++g) d.genres.push_back("Genre " + std::to_string(g));
  }

  std::vector<double> popularity(n_genres);
  for (std::size_t g = 0; g < n_genres; ++g)
    popularity[g] = std::pow(static_cast<double>(g + 1), -p.genre_skew);

  std::vector<std::vector<std::int64_t>> items_of_genre(n_genres);
  const auto& first_names = detail::creator_first_names();
  std::int64_t next_item = 0;
  for (int c = 0; c < p.n_creators; ++c) {
    CreatorRecord rec;
    rec.id = c;
    rec.name = first_names[static_cast<std::size_t>(c) % first_names.size()];
    if (static_cast<std::size_t>(c) >= first_names.size())
      rec.name += " " + std::to_string(c / static_cast<int>(first_names.size()) + 1);
    rec.followers = static_cast<std::int64_t>(std::round(std::exp(rng.normal(6.0, 1.5))));
    d.creators.push_back(rec);

    const auto main_genre = rng.categorical(popularity);
    const auto span = p.span_min_days +
                      static_cast<int>(rng.below(static_cast<std::uint64_t>(p.span_max_days - p.span_min_days + 1)));
    const auto n_items = std::max<std::int64_t>(
        1, std::llround(p.items_median * std::exp(p.activity_sigma * rng.normal())));
    for (std::int64_t k = 0; k < n_items; ++k) {
      const auto genre = rng.bernoulli(p.concentration) ? main_genre : rng.categorical(popularity);
      ItemRow item;
      item.id = next_item++;
      item.creator_id = c;
      item.genre = GenreId(static_cast<std::uint32_t>(genre));
      const auto gname = d.genres[genre];
      item.title = rec.name + " " + gname + " video " + std::to_string(k + 1);
      item.tags = {detail::lower(gname), "vlog" + std::to_string(rng.below(5))};
      item.description = "A " + detail::lower(gname) + " video by " + rec.name + ".";
      // First and last uploads pin the calendar span; the rest fall in between.
      if (k == 0) item.created_day = 0;
      else if (k == n_items - 1) item.created_day = span - 1;
      else item.created_day = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span)));
      items_of_genre[genre].push_back(item.id);
      d.items.push_back(std::move(item));
    }
  }

  for (int u = 0; u < p.n_users; ++u) {
    d.users.push_back({u, "user" + std::to_string(u)});
    std::vector<double> remaining = popularity;
    std::vector<std::size_t> favorites;
    for (int f = 0; f < p.user_favorite_genres; ++f) {
      const auto g = rng.categorical(remaining);
      favorites.push_back(g);
      remaining[g] = 0.0;
    }
    const auto n_inter = p.interactions_min +
                         static_cast<int>(rng.below(static_cast<std::uint64_t>(p.interactions_max - p.interactions_min + 1)));
    for (int k = 0; k < n_inter; ++k) {
      std::size_t genre = rng.bernoulli(p.user_focus)
                              ? favorites[rng.below(favorites.size())]
                              : rng.categorical(popularity);
      std::int64_t item_id;
      if (!items_of_genre[genre].empty()) {
        item_id = items_of_genre[genre][rng.below(items_of_genre[genre].size())];
      } else {
        item_id = static_cast<std::int64_t>(rng.below(d.items.size()));
      }
      std::int64_t day;
      if (k == 0) day = 0;
      else if (k == n_inter - 1) day = p.user_span_days - 1;
      else day = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p.user_span_days)));
      d.interactions.push_back({u, item_id, day});
    }
  }
  d.index_and_validate();
  return d;
}

}  // namespace platsim
